import json
import math

import numpy as np
import pytest

from conftest import LN2
from qcorr.errors import ScenarioParseError, ScenarioValidationError
from qcorr.scenario import parse_number, parse_scenario, preset_state, run


def scenario(**fields):
    return parse_scenario(json.dumps({"schema_version": 1, **fields}))


def rows_by_first(rep):
    return {r[0]: r[1:] for r in rep.rows}


class TestParse:
    def test_positions_on_malformed_json(self):
        with pytest.raises(ScenarioParseError) as info:
            parse_scenario('{\n  "schema_version": 1,\n  "kind": swap\n}')
        assert (info.value.line, info.value.column) == (3, 11)
        assert "line 3" in str(info.value)

    def test_unknown_field(self):
        with pytest.raises(ScenarioValidationError) as info:
            scenario(kind="swap", a2=0.5, c2=0.5, colour="red")
        assert info.value.field == "colour"

    def test_nested_field_path(self):
        with pytest.raises(ScenarioValidationError) as info:
            scenario(kind="entropy", state={"preset": "bell", "extra": 1})
        assert info.value.field == "state.extra"

    def test_out_of_range(self):
        with pytest.raises(ScenarioValidationError) as info:
            scenario(kind="swap", a2=1.5, c2=0.5)
        assert info.value.field == "a2"

    def test_schema_version(self):
        with pytest.raises(ScenarioValidationError) as info:
            parse_scenario('{"schema_version": 2, "kind": "swap"}')
        assert info.value.field == "schema_version"

    def test_unknown_kind(self):
        with pytest.raises(ScenarioValidationError) as info:
            parse_scenario('{"schema_version": 1, "kind": "plot"}')
        assert info.value.field == "kind"

    def test_unknown_preset(self):
        with pytest.raises(ScenarioValidationError):
            scenario(kind="entropy", state={"preset": "ghz"})

    def test_seed_range(self):
        with pytest.raises(ScenarioValidationError):
            scenario(kind="jcm", seed=2**64)
        assert scenario(kind="jcm", seed=2**64 - 1).seed == 2**64 - 1

    def test_numbers(self):
        assert parse_number("pi/4") == math.pi / 4
        assert parse_number("0.5*pi") == math.pi / 2
        assert parse_number("2pi") == 2 * math.pi
        assert parse_number(3) == 3.0
        with pytest.raises(ValueError):
            parse_number("e")


class TestPresets:
    def test_presets(self):
        assert preset_state("bell").dim == 4
        np.testing.assert_allclose(np.abs(preset_state("eq14").vector[[0, 3, 12, 15]]), 0.5)
        assert preset_state("swap21", 0.75, 0.875).vector[0] == pytest.approx(math.sqrt(0.75 * 0.875))

    def test_swap21_needs_coefficients(self):
        with pytest.raises(ScenarioValidationError):
            preset_state("swap21")


class TestRunners:
    def test_entropy_bits(self):
        rep = run(scenario(kind="entropy", state={"preset": "bell"}, subsets=[["1"]], units="bits"))
        assert rep.rows == [["1", 1.0]]

    def test_entropy_explicit_layout(self):
        sc = scenario(kind="entropy", state={"amplitudes": [1, 0, 0, 0, 0, 1], "dims": [2, 3], "labels": ["q", "t"]},
                      subsets=[["q"], ["t"], ["q", "t"]])
        values = rows_by_first(run(sc))
        assert values["q"][0] == pytest.approx(LN2, abs=1e-11)
        assert values["qt"][0] == pytest.approx(0, abs=1e-11)

    def test_entropy_density(self):
        sc = scenario(kind="entropy", state={"density": [[0.5, 0], [0, 0.5]], "dims": [2]})
        assert rows_by_first(run(sc))["1"][0] == pytest.approx(LN2, abs=1e-11)

    def test_random_state_needs_seed(self):
        with pytest.raises(ScenarioValidationError) as info:
            run(scenario(kind="entropy", state={"random": "pure", "dims": [2, 2]}))
        assert info.value.field == "seed"

    def test_correlations_outer_qubits(self):
        rep = run(scenario(kind="correlations", state={"preset": "eq14"}, blocks=[["1"], ["4"]]))
        assert abs(rows_by_first(rep)["index(I_14)"][0]) < 1e-10
        assert rep.ok

    def test_swap_rows(self):
        rep = run(scenario(kind="swap", a2=0.75, c2=0.875))
        assert [r[0] for r in rep.rows] == ["Psi+", "Psi-", "Phi+", "Phi-"]
        row = dict(zip(rep.columns, rep.rows[0]))
        assert row["probability"] == pytest.approx(11 / 32, abs=1e-12)
        assert row["rho1_00"] == pytest.approx(21 / 22, abs=1e-12)
        assert row["rho1_11"] == pytest.approx(1 / 22, abs=1e-12)
        assert row["holds"] is True

    def test_swap_amplitudes(self):
        rep = run(scenario(kind="swap", amplitudes=[1, 1, 1, 1]))
        assert rep.ok and len(rep.rows) == 4

    def test_swap_without_bound_enforcement(self):
        rep = run(scenario(kind="swap", a2=0.75, c2=0.875, enforce_bound=False))
        assert "swap_bound" not in [c.name for c in rep.checks]

    def test_iterated_swap(self):
        rep = run(scenario(kind="swap", a2=0.75, c2=0.875, stages=5))
        i14 = [r[-1] for r in rep.rows]
        assert len(i14) == 5 and all(b < a for a, b in zip(i14, i14[1:]))

    def test_sampled_iteration_needs_seed(self):
        with pytest.raises(ScenarioValidationError):
            run(scenario(kind="swap", a2=0.75, c2=0.875, stages=3, outcome="sample"))

    def test_evolve_rows(self):
        sc = scenario(kind="evolve", seed=4, state={"preset": "eq14"}, hamiltonian={"random": True},
                      acts_on=["2", "3"], times={"start": 0, "stop": 2, "num": 20},
                      checks=["total_correlation_additivity", "invariants"])
        rep = run(sc)
        t = [r[0] for r in rep.rows]
        assert len(t) == 20 and all(b > a for a, b in zip(t, t[1:]))
        assert rep.ok

    def test_evolve_precondition_reported(self):
        sc = scenario(kind="evolve", seed=4, state={"random": "pure", "dims": [2, 2, 2]}, hamiltonian={"random": True},
                      acts_on=["2", "3"], times=[0, 1], checks=["three_system_identity"])
        rep = run(sc)
        assert not rep.ok and "precondition" in rep.checks[0].detail

    def test_evolve_matrix_must_be_hermitian(self):
        sc = scenario(kind="evolve", state={"preset": "bell"}, hamiltonian={"matrix": [[0, 1], [0, 0]]},
                      acts_on=["1"], times=[0, 1])
        with pytest.raises(ScenarioValidationError):
            run(sc)

    def test_invariants(self):
        rep = run(scenario(kind="invariants", seed=1, state={"preset": "eq14"}, interacting=["2", "3"], trials=5))
        assert rep.ok
        assert sum(1 for r in rep.rows if r[1] == "invariant_entropy") == 7

    def test_jcm(self):
        rep = run(scenario(kind="jcm"))
        assert rep.ok
        final = dict(zip(rep.columns, rep.rows[-1]))
        assert final["I_A1,A2"] == pytest.approx(2 * LN2, abs=1e-9)

    def test_jcm_cutoff_too_small(self):
        rep = run(scenario(kind="jcm", fock_cutoff=2))
        assert not rep.ok and rep.rows == []

    def test_sweep_jcm(self):
        rep = run(scenario(kind="sweep", target="jcm", t1={"start": 0, "stop": "pi/2", "step": "pi/4"},
                           t2={"start": 0, "stop": "pi/2", "step": "pi/4"}))
        assert len(rep.rows) == 9 and rep.ok

    def test_sweep_needs_ranges(self):
        with pytest.raises(ScenarioValidationError):
            run(scenario(kind="sweep", target="swap_bound"))

    def test_meta_carries_name_and_seed(self):
        rep = run(scenario(kind="jcm", name="x", seed=3))
        assert rep.meta["name"] == "x" and rep.meta["seed"] == 3
