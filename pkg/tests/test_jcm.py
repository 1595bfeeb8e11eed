import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import LN2
from qcorr.errors import CutoffExceeded
from qcorr.jcm import (
    CavitySystem,
    annihilation,
    exchange_protocol,
    expectation,
    initial_state,
    jc_hamiltonian,
    number_operator,
    transit,
)
from qcorr.quantum_state import basis_state, reduce

SYSTEM = CavitySystem(3, 1.0)


def flat(system, a1, n, a2):
    return int(np.ravel_multi_index((a1, n, a2), (2, system.fock_cutoff, 2)))


class TestHamiltonian:
    @pytest.mark.parametrize("which", [1, 2])
    def test_hermitian(self, which):
        h = jc_hamiltonian(SYSTEM, which)
        assert np.max(np.abs(h - h.conj().T)) <= 1e-14
        assert h.shape == (12, 12)

    def test_single_excitation_element(self):
        g = 0.37
        sys_ = CavitySystem(3, g)
        h = jc_hamiltonian(sys_, 1)
        assert h[flat(sys_, 1, 0, 0), flat(sys_, 0, 1, 0)] == pytest.approx(g, abs=1e-15)
        h2 = jc_hamiltonian(sys_, 2)
        assert h2[flat(sys_, 0, 0, 1), flat(sys_, 0, 1, 0)] == pytest.approx(g, abs=1e-15)

    def test_two_photon_element(self):
        h = jc_hamiltonian(SYSTEM, 1)
        assert h[flat(SYSTEM, 1, 1, 0), flat(SYSTEM, 0, 2, 0)] == pytest.approx(math.sqrt(2), abs=1e-15)

    @pytest.mark.parametrize("which", [1, 2])
    def test_commutes_with_excitation_number(self, which):
        h, n = jc_hamiltonian(SYSTEM, which), number_operator(SYSTEM)
        assert np.max(np.abs(h @ n - n @ h)) <= 1e-14

    def test_annihilation(self):
        a = annihilation(3)
        np.testing.assert_allclose(a.conj().T @ a, np.diag([0, 1, 2]), atol=1e-15)

    def test_bad_atom(self):
        with pytest.raises(ValueError):
            jc_hamiltonian(SYSTEM, 3)


class TestTransit:
    def test_zero_duration(self):
        s = initial_state(SYSTEM)
        np.testing.assert_allclose(transit(s, SYSTEM, 1, 0.0).vector, s.vector, atol=1e-15)

    def test_quarter_rabi(self):
        out = transit(initial_state(SYSTEM), SYSTEM, 1, math.pi / 4)
        rho_a1 = reduce(out, ["A1"]).rho
        assert abs(rho_a1[0, 0].real - 0.5) < 1e-12

    def test_photon_absorbed(self):
        g = 2.0
        sys_ = CavitySystem(3, g)
        s = basis_state([0, 1, 0], sys_.layout)
        out = transit(s, sys_, 2, math.pi / (2 * g))
        assert abs(reduce(out, ["A2"]).rho[1, 1].real - 1) < 1e-12

    @settings(max_examples=30, deadline=None)
    @given(t=st.floats(0, 10))
    def test_rabi_formula(self, t):
        out = transit(initial_state(SYSTEM), SYSTEM, 1, t)
        assert abs(reduce(out, ["A1"]).rho[1, 1].real - math.cos(t) ** 2) < 1e-12

    def test_cutoff_too_small(self):
        tiny = CavitySystem(2, 1.0)
        with pytest.raises(CutoffExceeded):
            transit(initial_state(tiny), tiny, 1, math.pi / 4)

    def test_cutoff_below_two_rejected(self):
        with pytest.raises(ValueError):
            CavitySystem(1)


class TestExchange:
    def test_entanglement_moved_to_atoms(self):
        res = exchange_protocol(SYSTEM, math.pi / 4, math.pi / 2)
        f = res.final
        assert f["S_F"] <= 1e-9
        assert abs(f["I_A1,A2"] - 2 * LN2) <= 1e-9
        assert abs(f["I_A1,F"]) <= 1e-9
        assert res.a1_entropy_drift <= 1e-10
        assert res.excitation_drift <= 1e-10
        assert res.top_fock_max < 1e-12

    def test_after_first_transit(self):
        first = exchange_protocol(SYSTEM, math.pi / 4, math.pi / 2).stages["after_first"]
        assert abs(first["I_A1,F"] - 2 * LN2) < 1e-12
        assert abs(first["S_A2"]) < 1e-12

    def test_no_second_transit(self):
        res = exchange_protocol(SYSTEM, math.pi / 4, 0.0)
        assert res.final["I_A1,F"] == pytest.approx(res.stages["after_first"]["I_A1,F"], abs=1e-14)

    def test_global_purity(self):
        res = exchange_protocol(SYSTEM, 0.3, 1.1)
        assert max(st_["S_total"] for st_ in res.stages.values()) <= 1e-10

    @settings(max_examples=20, deadline=None)
    @given(t1=st.floats(0, math.pi), t2=st.floats(0, math.pi))
    def test_arbitrary_times(self, t1, t2):
        res = exchange_protocol(SYSTEM, t1, t2, samples=7)
        assert res.identity.max_residual <= 1e-9 and res.identity.holds
        assert res.excitation_drift <= 1e-10
        i_af = res.second_transit.series([["A1"], ["F"]])
        i_aa = res.second_transit.series([["A1"], ["A2"]])
        assert np.all(i_af <= i_af[0] + 1e-9) and np.all(i_aa >= i_aa[0] - 1e-9)

    def test_excitation_is_one(self):
        s = initial_state(SYSTEM)
        assert expectation(s, number_operator(SYSTEM)) == 1.0

    def test_negative_time(self):
        with pytest.raises(ValueError):
            exchange_protocol(SYSTEM, -1.0, 1.0)
