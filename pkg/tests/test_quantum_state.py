import numpy as np
import pytest

from conftest import LN2, bell_vector, two_bell_vector
from qcorr.entropy import subset_entropy
from qcorr.errors import (
    DimensionMismatch,
    DuplicateLabel,
    IncompleteProjectorSet,
    InvalidDensity,
    NotNormalized,
    ZeroVector,
)
from qcorr.linalg import SubsystemLayout
from qcorr.quantum_state import (
    apply_unitary,
    basis_state,
    density,
    discard,
    mixed_state,
    product,
    projective_measure,
    pure_state,
    purify_if_pure,
    purity,
    reduce,
)
from qcorr.sampling import random_mixed_state, random_pure_state, random_unitary
from qcorr.swapping import bell_basis

ONE = SubsystemLayout([2])
TWO = SubsystemLayout.qubits(2)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])


def swap_input_vector(a2, c2):
    a, b, c, d = np.sqrt([a2, 1 - a2, c2, 1 - c2])
    v = np.zeros(16)
    v[0b0000], v[0b0011], v[0b1100], v[0b1111] = a * c, a * d, b * c, b * d
    return v


class TestPureState:
    def test_bell(self):
        s = pure_state(np.array([1, 0, 0, 1]) / np.sqrt(2), TWO)
        np.testing.assert_allclose(s.vector, bell_vector())
        assert s.is_pure and s.labels == ("1", "2")

    def test_ket_zero(self):
        np.testing.assert_array_equal(pure_state([1, 0], ONE).vector, [1, 0])

    def test_renormalises(self):
        np.testing.assert_allclose(pure_state([1, 1, 1, 1], TWO).vector, [0.5] * 4)

    def test_strict_mode_accepts_rounding(self):
        s = pure_state([0.7071068, 0, 0, 0.7071068], TWO, normalize=False)
        assert abs(np.linalg.norm(s.vector) - 1) < 1e-15

    def test_strict_mode_rejects_unnormalised(self):
        with pytest.raises(NotNormalized):
            pure_state([1, 1, 1, 1], TWO, normalize=False)

    def test_zero_vector(self):
        with pytest.raises(ZeroVector):
            pure_state([0, 0], ONE)

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatch):
            pure_state([1, 0, 0], TWO)


class TestDensity:
    def test_ket_zero(self):
        np.testing.assert_array_equal(density(pure_state([1, 0], ONE)), np.diag([1, 0]))

    def test_bell_corners(self, bell):
        rho = density(bell)
        expected = np.zeros((4, 4))
        expected[np.ix_([0, 3], [0, 3])] = 0.5
        np.testing.assert_allclose(rho, expected, atol=1e-15)

    def test_swap_input_diagonal(self):
        a, c = np.sqrt(3 / 4), np.sqrt(7 / 8)
        s = product([pure_state([a, 0, 0, np.sqrt(1 - a * a)], TWO),
                     pure_state([c, 0, 0, np.sqrt(1 - c * c)], SubsystemLayout.qubits(2, ["3", "4"]))])
        diag = np.real(np.diag(density(s)))
        expected = np.zeros(16)
        expected[[0b0000, 0b0011, 0b1100, 0b1111]] = [21 / 32, 3 / 32, 7 / 32, 1 / 32]
        np.testing.assert_allclose(diag, expected, atol=1e-15)

    def test_mixed_validation(self):
        with pytest.raises(InvalidDensity):
            mixed_state(np.diag([0.6, 0.6]), ONE)
        with pytest.raises(InvalidDensity):
            mixed_state(np.diag([1.2, -0.2]), ONE)


class TestProduct:
    def test_two_bell_pairs(self, bell):
        s = product([bell, pure_state(bell_vector(), SubsystemLayout.qubits(2, ["3", "4"]))])
        np.testing.assert_allclose(s.vector, two_bell_vector(), atol=1e-15)
        assert s.labels == ("1", "2", "3", "4")

    def test_kets(self):
        s = product([pure_state([1, 0], ONE), pure_state([1, 0], SubsystemLayout([2], ["2"]))])
        np.testing.assert_array_equal(s.vector, [1, 0, 0, 0])

    def test_swap_input_state(self):
        a, c = np.sqrt(3) / 2, np.sqrt(7 / 8)
        s = product([pure_state([a, 0, 0, np.sqrt(1 - a * a)], TWO),
                     pure_state([c, 0, 0, np.sqrt(1 - c * c)], SubsystemLayout.qubits(2, ["3", "4"]))])
        np.testing.assert_allclose(s.vector, swap_input_vector(3 / 4, 7 / 8), atol=1e-15)

    def test_mixed_factor(self, bell, rng):
        m = random_mixed_state(SubsystemLayout([2], ["3"]), rng)
        s = product([bell, m])
        assert not s.is_pure
        np.testing.assert_allclose(s.rho, np.kron(density(bell), m.rho))

    def test_label_clash(self, bell):
        with pytest.raises(DuplicateLabel):
            product([bell, bell])


class TestApplyUnitary:
    def test_identity(self, two_bell):
        out = apply_unitary(two_bell, np.eye(4), ["2", "3"])
        np.testing.assert_array_equal(out.vector, two_bell.vector)

    def test_swap_middle_labels(self):
        s = basis_state([0, 1, 1, 0], SubsystemLayout.qubits(4))
        np.testing.assert_array_equal(apply_unitary(s, SWAP, ["2", "3"]).vector, s.vector)
        s = basis_state([0, 1, 0, 0], SubsystemLayout.qubits(4))
        np.testing.assert_array_equal(apply_unitary(s, SWAP, ["2", "3"]).vector,
                                      basis_state([0, 0, 1, 0], SubsystemLayout.qubits(4)).vector)

    def test_outer_entropy_unchanged(self, two_bell, rng):
        for _ in range(10):
            out = apply_unitary(two_bell, random_unitary(4, rng), ["2", "3"])
            assert abs(subset_entropy(out, ["1"]) - LN2) < 1e-12

    def test_mixed_state_evolution(self, rng):
        s = random_mixed_state(SubsystemLayout.qubits(3), rng)
        u = random_unitary(4, rng)
        out = apply_unitary(s, u, ["1", "2"])
        full = np.kron(u, np.eye(2))
        np.testing.assert_allclose(out.rho, full @ s.rho @ full.conj().T, atol=1e-14)


class TestReduce:
    def test_reduce_and_discard_agree(self, two_bell):
        np.testing.assert_allclose(reduce(two_bell, ["1", "4"]).rho, discard(two_bell, ["2", "3"]).rho)

    def test_purify_round_trip(self, bell):
        back = purify_if_pure(mixed_state(density(bell), TWO))
        assert back.is_pure
        assert abs(abs(np.vdot(back.vector, bell.vector)) - 1) < 1e-12

    def test_purity(self, rng):
        s = random_mixed_state(TWO, rng)
        assert purity(s) <= 1 + 1e-12
        assert purity(random_pure_state(TWO, rng)) == 1.0


class TestMeasure:
    def test_computational_basis(self):
        s = pure_state([1, 0], ONE)
        out = projective_measure(s, [np.diag([1, 0]), np.diag([0, 1])], ["1"])
        assert out[0].probability == 1.0 and not out[0].empty
        np.testing.assert_array_equal(out[0].state.vector, [1, 0])
        assert out[1].probability == 0.0 and out[1].empty

    def test_bell_measurement_probability_and_output_qubit(self):
        s = pure_state(swap_input_vector(3 / 4, 7 / 8), SubsystemLayout.qubits(4))
        proj = bell_basis()
        out = projective_measure(s, [proj[k] for k in ("Psi+", "Psi-", "Phi+", "Phi-")], ["2", "3"])
        assert abs(out[0].probability - 11 / 32) < 1e-12
        assert abs(sum(o.probability for o in out) - 1) < 1e-12
        np.testing.assert_allclose(reduce(out[0].state, ["1"]).rho, np.diag([21 / 22, 1 / 22]), atol=1e-12)

    def test_mixed_input(self, rng):
        s = random_mixed_state(TWO, rng)
        out = projective_measure(s, [np.diag([1, 0]), np.diag([0, 1])], ["2"])
        assert abs(out[0].probability + out[1].probability - 1) < 1e-12

    def test_incomplete_set(self):
        with pytest.raises(IncompleteProjectorSet):
            projective_measure(pure_state([1, 0], ONE), [np.diag([1, 0])], ["1"])

    def test_not_idempotent(self):
        with pytest.raises(IncompleteProjectorSet):
            projective_measure(pure_state([1, 0], ONE), [np.eye(2) / 2, np.eye(2) / 2], ["1"])
