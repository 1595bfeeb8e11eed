"""Acceptance criteria, shared by the pytest suite and ``qcorr selftest``.

Each criterion is a function returning a :class:`CriterionResult`; all
randomness is drawn from fixed seeds so repeated runs are identical.
"""

from __future__ import annotations

import json
import math
import tempfile
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import dynamics, jcm, swapping
from .entropy import check_mi_bound, check_ssa, index_of_correlation
from .linalg import SubsystemLayout
from .partition import invariant_entropies, verify_invariance
from .quantum_state import product
from .report import Report
from .sampling import random_hermitian, random_mixed_state, random_pure_state
from .scenario import preset_state

LN2 = math.log(2)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d}. {self.title}: {self.detail}"


def _random_state(layout, rng, k):
    return random_pure_state(layout, rng) if k % 2 == 0 else random_mixed_state(layout, rng)


def criterion_1() -> CriterionResult:
    o = swapping.run_swap(swapping.SwapInput.from_squares(3 / 4, 7 / 8))[0]
    rho_err = float(np.max(np.abs(o.rho1 - np.diag([21 / 22, 1 / 22]))))
    p_err = abs(o.probability - 11 / 32)
    ok = o.outcome == "Psi+" and rho_err <= 1e-12 and p_err <= 1e-12
    return CriterionResult(1, "swap example rho1 = diag(21/22, 1/22), p = 11/32", ok,
                           f"max|rho1 err|={rho_err:.2e}, |p err|={p_err:.2e}")


def criterion_2() -> CriterionResult:
    grid = [round(0.50 + 0.01 * k, 2) for k in range(50)]
    worst, violations, bias_points, bias_fail, rows = -math.inf, [], 0, 0, 0
    for a2 in grid:
        for c2 in grid:
            res = swapping.check_swap_bound(swapping.SwapInput.from_squares(a2, c2))
            for o in res.outcomes:
                rows += 1
                excess = o.i14 - res.bound
                worst = max(worst, excess)
                if excess > 1e-9:
                    violations.append((a2, c2, o.outcome))
            if res.bias_exceeds is not None:
                bias_points += 1
                bias_fail += not res.bias_exceeds
    ok = not violations and bias_fail == 0 and bias_points > 0
    first = f"; first violation a2={violations[0][0]}, c2={violations[0][1]}, {violations[0][2]}" if violations else ""
    return CriterionResult(
        2, "I14^M <= min(I12, I34) on the 50x50 grid, all outcomes; eps1^M > eps3 on the ordered subgrid", ok,
        f"{len(violations)}/{rows} outcome rows exceed the bound (max excess {worst:.4g} nats){first}; "
        f"bias check failed at {bias_fail}/{bias_points} ordered points",
    )


def criterion_3() -> CriterionResult:
    labels = ["1", "2", "3", "4"]
    inv = invariant_entropies(labels, ["2", "3"])
    expected = {("1",), ("4",), ("1", "4"), ("2", "3"), ("1", "2", "3"), ("2", "3", "4"), ("1", "2", "3", "4")}
    census_ok = set(inv.invariant_entropy_subsets) == expected and len(inv.invariant_entropy_subsets) == 7
    rng = np.random.default_rng(3)
    layout = SubsystemLayout.qubits(4)
    worst, s2_max = 0.0, 0.0
    for _ in range(20):
        state = random_pure_state(layout, rng)
        rep = verify_invariance(state, ["2", "3"], 50, rng)
        worst = max(worst, rep.max_entropy_drift)
        s2_max = max(s2_max, rep.control_drift[("2",)])
    ok = census_ok and worst <= 1e-9 and s2_max > 1e-3
    return CriterionResult(3, "seven invariant entropies under U_23; S_2 moves", ok,
                           f"census={'exact' if census_ok else 'WRONG'}, max drift={worst:.2e}, max S_2 drift={s2_max:.3f}")


def criterion_4() -> CriterionResult:
    rng = np.random.default_rng(4)
    times = np.linspace(0.0, 3.0, 11)
    worst, monotone_fail = 0.0, 0
    for k in range(100):
        s12 = _random_state(SubsystemLayout.qubits(2, ["1", "2"]), rng, k)
        s3 = _random_state(SubsystemLayout([2], ["3"]), rng, k // 2)
        state = product([s12, s3])
        trace = dynamics.evolve_trace(state, random_hermitian(4, rng), ["2", "3"], times)
        check = dynamics.check_three_system_identity(trace)
        worst = max(worst, check.max_residual)
        monotone_fail += bool(check.violations)
    ok = worst <= 1e-9 and monotone_fail == 0
    return CriterionResult(4, "three-system identity and I_12 monotonicity, 100 scenarios", ok,
                           f"max residual={worst:.2e}, monotonicity failures={monotone_fail}")


def criterion_5() -> CriterionResult:
    rng = np.random.default_rng(5)
    times = np.linspace(0.0, 3.0, 11)
    worst, fall = 0.0, 0
    for k in range(100):
        s12 = _random_state(SubsystemLayout.qubits(2, ["1", "2"]), rng, k)
        s34 = _random_state(SubsystemLayout.qubits(2, ["3", "4"]), rng, k // 2)
        trace = dynamics.evolve_trace(product([s12, s34]), random_hermitian(4, rng), ["2", "3"], times)
        check = dynamics.check_total_correlation_additivity(trace)
        worst = max(worst, check.max_residual)
        fall += bool(check.violations)
    eq14 = preset_state("eq14")
    i23_max = 0.0
    for _ in range(10):
        trace = dynamics.evolve_trace(eq14, random_hermitian(4, rng), ["2", "3"], times)
        i23_max = max(i23_max, float(np.max(trace.series([["2"], ["3"]]))))
    ok = worst <= 1e-9 and fall == 0 and i23_max <= 1e-9
    return CriterionResult(5, "I_1234(t) = I_1234(0) + I_23(t), non-decreasing; I_23 = 0 for Bell pairs", ok,
                           f"max residual={worst:.2e}, decreases={fall}, Bell-pair max I_23={i23_max:.2e}")


def criterion_6() -> CriterionResult:
    s = preset_state("eq14")
    i1b = index_of_correlation(s, [["1"], ["2", "3"]])
    i4b = index_of_correlation(s, [["4"], ["2", "3"]])
    i14 = index_of_correlation(s, [["1"], ["4"]])
    itot = index_of_correlation(s, [["1"], ["2"], ["3"], ["4"]])
    ok = i1b > 0 and i4b > 0 and abs(i14) <= 1e-10 and abs(itot - 4 * LN2) <= 1e-9
    return CriterionResult(6, "non-transitivity on Bell x Bell", ok,
                           f"I_1{{23}}={i1b:.6f}, I_4{{23}}={i4b:.6f}, I_14={i14:.1e}, I_1234-4ln2={itot - 4 * LN2:.1e}")


def criterion_7() -> CriterionResult:
    rng = np.random.default_rng(7)
    mi_fail = ssa_fail = 0
    two = SubsystemLayout.qubits(2)
    three = SubsystemLayout.qubits(3)
    for k in range(1000):
        mi_fail += not check_mi_bound(_random_state(two, rng, k), ["1"], ["2"]).holds
        ssa_fail += not check_ssa(_random_state(three, rng, k), ["1"], ["2"], ["3"]).holds
    bell = check_mi_bound(preset_state("bell"), ["1"], ["2"])
    sat = abs(bell.value - 2 * LN2) <= 1e-10 and abs(bell.bound - 2 * LN2) <= 1e-10
    ok = mi_fail == 0 and ssa_fail == 0 and sat
    return CriterionResult(7, "MI bound and strong subadditivity on 1000 states each; Bell saturation", ok,
                           f"MI failures={mi_fail}, SSA failures={ssa_fail}, Bell I-2ln2={bell.value - 2 * LN2:.1e}")


def criterion_8() -> CriterionResult:
    res = jcm.exchange_protocol(jcm.CavitySystem(3, 1.0), math.pi / 4, math.pi / 2)
    f = res.final
    ok = (f["S_F"] <= 1e-9 and abs(f["I_A1,A2"] - 2 * LN2) <= 1e-9
          and res.a1_entropy_drift <= 1e-10 and res.excitation_drift <= 1e-10)
    return CriterionResult(8, "cavity exchange: field decoupled, atoms share 2 ln 2", ok,
                           f"S_F={f['S_F']:.1e}, I_A1A2-2ln2={f['I_A1,A2'] - 2 * LN2:.1e}, "
                           f"S_A1 drift={res.a1_entropy_drift:.1e}, excitation drift={res.excitation_drift:.1e}")


def criterion_9() -> CriterionResult:
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(500):
        inp = swapping.SwapInput.from_squares(rng.uniform(0, 1), rng.uniform(0, 1))
        for a, m in zip(swapping.run_swap(inp), swapping.run_swap_measured(inp)):
            worst = max(worst, abs(a.probability - m.probability))
            worst = max(worst, float(np.max(np.abs(a.post_state_14.density() - m.post_state_14.density()))))
    return CriterionResult(9, "closed-form swap equals projective-measurement pipeline, 500 inputs", worst <= 1e-10,
                           f"max deviation={worst:.2e}")


def criterion_10() -> CriterionResult:
    from .cli import main

    mismatched = []
    runs = 0
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        for name, text in bundled_scenarios().items():
            path = tmp / name
            path.write_text(text, encoding="utf-8")
            kind = json.loads(text)["kind"]
            for fmt in ("csv", "json"):
                outs = []
                for rep_no in range(2):
                    out = tmp / f"{name}.{rep_no}.{fmt}"
                    main([kind, "--scenario", str(path), "--out", str(out), "--format", fmt], quiet=True)
                    outs.append(out.read_bytes())
                runs += 1
                if outs[0] != outs[1]:
                    mismatched.append(f"{name}/{fmt}")
        selftest = [render_selftest(run_criteria(exclude=(10,))) for _ in range(2)]
        runs += 1
        if selftest[0] != selftest[1]:
            mismatched.append("selftest")
    return CriterionResult(10, "byte-identical reports on repeated runs", not mismatched,
                           f"{runs - len(mismatched)}/{runs} report pairs identical" + (f"; differ: {mismatched}" if mismatched else ""))


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}


def run_criteria(exclude=()) -> list[CriterionResult]:
    return [fn() for n, fn in CRITERIA.items() if n not in exclude]


def selftest_report(results: list[CriterionResult]) -> Report:
    rep = Report("selftest", ["criterion", "title", "passed", "detail"])
    for r in results:
        rep.add_row(r.number, r.title, r.passed, r.detail)
        rep.add_check(f"criterion_{r.number}", r.passed, r.detail)
    return rep


def render_selftest(results: list[CriterionResult]) -> bytes:
    from .report import to_json

    return to_json(selftest_report(results)).encode()


def bundled_scenarios() -> dict[str, str]:
    """Example scenario files shipped with the package, by file name."""
    root = resources.files("qcorr") / "scenarios"
    return {p.name: p.read_text(encoding="utf-8") for p in sorted(root.iterdir(), key=lambda p: p.name)
            if p.name.endswith(".json")}

