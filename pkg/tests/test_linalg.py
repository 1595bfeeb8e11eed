import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bell_vector, two_bell_vector
from qcorr.errors import DimensionMismatch, DuplicateLabel, NotHermitian, NotSquare, NotUnitary, UnknownLabel
from qcorr.linalg import (
    SubsystemLayout,
    embed_operator,
    embed_unitary,
    hermitian_eigenvalues,
    kron,
    partial_trace,
)
from qcorr.sampling import random_hermitian, random_mixed_state, random_unitary

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def brute_partial_trace(m, dims, keep):
    """Explicit index contraction, one matrix entry at a time."""
    n = len(dims)
    keep = sorted(keep)
    drop = [k for k in range(n) if k not in keep]
    kd = [dims[k] for k in keep]
    dd = [dims[k] for k in drop]
    out = np.zeros((int(np.prod(kd)), int(np.prod(kd))), dtype=complex)
    for ki in itertools.product(*[range(d) for d in kd]):
        for kj in itertools.product(*[range(d) for d in kd]):
            acc = 0
            for r in itertools.product(*[range(d) for d in dd]):
                row, col = [0] * n, [0] * n
                for pos, val in zip(keep, ki):
                    row[pos] = val
                for pos, val in zip(keep, kj):
                    col[pos] = val
                for pos, val in zip(drop, r):
                    row[pos] = col[pos] = val
                acc += m[np.ravel_multi_index(row, dims), np.ravel_multi_index(col, dims)]
            out[np.ravel_multi_index(ki, kd), np.ravel_multi_index(kj, kd)] = acc
    return out


def permute_amplitudes(v, dims, perm):
    """Amplitudes of the state whose subsystem ``k`` holds what subsystem ``perm[k]`` held."""
    t = np.asarray(v).reshape(dims)
    return t.transpose(perm).reshape(-1)


class TestLayout:
    def test_default_labels(self):
        lay = SubsystemLayout([2, 3, 2])
        assert lay.labels == ("1", "2", "3")
        assert lay.dim == 12

    def test_rejects_duplicates(self):
        with pytest.raises(DuplicateLabel):
            SubsystemLayout([2, 2], ["a", "a"])

    def test_rejects_unknown_label(self):
        with pytest.raises(UnknownLabel):
            SubsystemLayout.qubits(2).positions(["7"])

    def test_rejects_trivial_dimension(self):
        with pytest.raises(ValueError):
            SubsystemLayout([1, 2])


class TestKron:
    def test_identity(self):
        np.testing.assert_array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_zero_factor(self):
        out = kron(np.zeros((2, 2)), np.arange(9).reshape(3, 3))
        assert out.shape == (6, 6)
        assert not out.any()

    def test_bell_densities_give_two_pair_density(self):
        b = bell_vector()
        rho = np.outer(b, b)
        v = two_bell_vector()
        np.testing.assert_allclose(kron(rho, rho), np.outer(v, v), atol=1e-15)


class TestEigenvalues:
    def test_half_identity(self):
        np.testing.assert_allclose(hermitian_eigenvalues(np.eye(2) / 2), [0.5, 0.5])

    def test_pauli_x(self):
        np.testing.assert_allclose(hermitian_eigenvalues([[0, 1], [1, 0]]), [-1, 1], atol=1e-15)

    def test_swap_output_qubit(self):
        np.testing.assert_allclose(hermitian_eigenvalues(np.diag([21 / 22, 1 / 22])), [1 / 22, 21 / 22], atol=1e-15)

    def test_not_square(self):
        with pytest.raises(NotSquare):
            hermitian_eigenvalues(np.zeros((2, 3)))

    def test_not_hermitian(self):
        with pytest.raises(NotHermitian):
            hermitian_eigenvalues([[0, 1], [0, 0]])

    def test_matches_characteristic_roots(self, rng):
        h = random_hermitian(5, rng)
        roots = np.sort(np.roots(np.poly(h)).real)
        np.testing.assert_allclose(hermitian_eigenvalues(h), roots, atol=1e-8)


class TestPartialTrace:
    def test_bell_half(self):
        b = bell_vector()
        out = partial_trace(np.outer(b, b), SubsystemLayout.qubits(2), ["1"])
        np.testing.assert_allclose(out, np.eye(2) / 2, atol=1e-15)

    def test_product_factorises(self, rng):
        r1 = random_mixed_state(SubsystemLayout([2]), rng).rho
        r2 = random_mixed_state(SubsystemLayout([3]), rng).rho
        out = partial_trace(np.kron(r1, 2.5 * r2), SubsystemLayout([2, 3]), ["1"])
        np.testing.assert_allclose(out, r1 * 2.5, atol=1e-14)

    def test_two_pairs_keep_outer_qubits(self):
        v = two_bell_vector()
        m = np.outer(v, v)
        out = partial_trace(m, SubsystemLayout.qubits(4), ["1", "4"])
        np.testing.assert_allclose(out, brute_partial_trace(m, [2, 2, 2, 2], [0, 3]), atol=1e-15)
        np.testing.assert_allclose(out, np.eye(4) / 4, atol=1e-15)

    def test_keep_order_is_layout_order(self, rng):
        lay = SubsystemLayout([2, 3, 2])
        m = random_mixed_state(lay, rng).rho
        np.testing.assert_allclose(partial_trace(m, lay, ["3", "1"]), partial_trace(m, lay, ["1", "3"]))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            partial_trace(np.eye(8), SubsystemLayout.qubits(2), ["1"])

    @settings(max_examples=40, deadline=None)
    @given(
        dims=st.lists(st.integers(2, 3), min_size=2, max_size=3),
        seed=st.integers(0, 2**32 - 1),
        data=st.data(),
    )
    def test_matches_brute_force(self, dims, seed, data):
        lay = SubsystemLayout(dims)
        keep = data.draw(st.sets(st.sampled_from(range(len(dims))), min_size=1))
        m = random_mixed_state(lay, np.random.default_rng(seed)).rho
        out = partial_trace(m, lay, [lay.labels[k] for k in keep])
        np.testing.assert_allclose(out, brute_partial_trace(m, dims, keep), atol=1e-13)
        assert abs(np.trace(out) - 1) < 1e-12


class TestEmbed:
    def test_identity(self):
        np.testing.assert_array_equal(embed_unitary(np.eye(4), SubsystemLayout.qubits(4), ["2", "3"]), np.eye(16))

    def test_swap_middle_pair_permutes_amplitudes(self, rng):
        v = rng.normal(size=16) + 1j * rng.normal(size=16)
        full = embed_unitary(SWAP, SubsystemLayout.qubits(4), ["2", "3"])
        np.testing.assert_allclose(full @ v, permute_amplitudes(v, [2] * 4, [0, 2, 1, 3]), atol=1e-15)

    def test_swap_on_two_pair_state(self):
        v = two_bell_vector()
        full = embed_unitary(SWAP, SubsystemLayout.qubits(4), ["2", "3"])
        np.testing.assert_allclose(full @ v, permute_amplitudes(v, [2] * 4, [0, 2, 1, 3]), atol=1e-15)

    def test_order_of_acts_on_matters(self, rng):
        u = random_unitary(4, rng)
        lay = SubsystemLayout.qubits(3)
        a = embed_unitary(u, lay, ["3", "1"])
        b = embed_unitary(SWAP @ u @ SWAP, lay, ["1", "3"])
        np.testing.assert_allclose(a, b, atol=1e-14)

    def test_mixed_dimensions_against_kron(self, rng):
        u = random_unitary(3, rng)
        lay = SubsystemLayout([2, 3, 2])
        np.testing.assert_allclose(embed_unitary(u, lay, ["2"]), np.kron(np.kron(np.eye(2), u), np.eye(2)), atol=1e-15)

    def test_rejects_non_unitary(self):
        with pytest.raises(NotUnitary):
            embed_unitary(np.diag([1, 2, 1, 1]), SubsystemLayout.qubits(2), ["1", "2"])

    def test_rejects_wrong_shape(self):
        with pytest.raises(DimensionMismatch):
            embed_operator(np.eye(2), SubsystemLayout.qubits(3), ["1", "2"])

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), pair=st.permutations(["1", "2", "3", "4"]))
    def test_embedded_unitary_stays_unitary(self, seed, pair):
        u = random_unitary(4, np.random.default_rng(seed))
        full = embed_unitary(u, SubsystemLayout.qubits(4), pair[:2])
        assert np.max(np.abs(full.conj().T @ full - np.eye(16))) <= 1e-10
