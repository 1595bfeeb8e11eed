"""Unitary evolution under embedded Hamiltonians and the correlation identities it obeys.

Time is dimensionless (ħ = 1, couplings folded into the Hamiltonian).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .entropy import MI_TOL, CorrelationReport, correlation_report, subset_name
from .errors import DimensionMismatch, PreconditionViolated
from .linalg import SubsystemLayout, check_hermitian, embed_unitary, hermitian_eigh
from .partition import invariant_entropies
from .quantum_state import QuantumState, apply_full_unitary, mixed_state, pure_state, product
from .sampling import random_hermitian, rng_from

RESIDUAL_TOL = 1e-9
UNCORRELATED_TOL = 1e-8


def propagator(hamiltonian, t: float) -> np.ndarray:
    """``exp(-i H t)`` from the eigendecomposition of ``H``."""
    evals, vecs = hermitian_eigh(hamiltonian)
    return (vecs * np.exp(-1j * evals * t)) @ vecs.conj().T


@dataclass
class EvolutionTrace:
    times: np.ndarray
    reports: list[CorrelationReport]
    states: list[QuantumState]
    acts_on: tuple[str, ...]
    invariant_drift: dict[str, float] = field(default_factory=dict)

    @property
    def layout(self) -> SubsystemLayout:
        return self.reports[0].layout

    def series(self, blocks) -> np.ndarray:
        """Index of correlation over ``blocks`` at every recorded time."""
        return np.array([r.index(blocks) for r in self.reports])

    def entropy_series(self, labels) -> np.ndarray:
        return np.array([r.entropy(labels) for r in self.reports])

    def internal_series(self, labels) -> np.ndarray:
        return np.array([r.internal(labels) for r in self.reports])


def _check_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=float).reshape(-1)
    if times.size == 0:
        raise ValueError("times must be non-empty")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    return times


def evolve_trace(state: QuantumState, hamiltonian, acts_on: Sequence, times) -> EvolutionTrace:
    """Record every subset entropy and correlation along ``exp(-iHt)`` on ``acts_on``.

    ``invariant_drift`` holds the largest change (relative to the first
    recorded time) of each entropy that is structurally invariant under the
    interaction, keyed ``S_<labels>``.
    """
    times = _check_times(times)
    h = check_hermitian(hamiltonian)
    acts_on = tuple(str(lab) for lab in acts_on)
    d = state.layout.subdim(acts_on)
    if h.shape != (d, d):
        raise DimensionMismatch(f"Hamiltonian shape {h.shape} does not match acts_on dimension {d}")
    evals, vecs = hermitian_eigh(h)
    states, reports = [], []
    for t in times:
        u = (vecs * np.exp(-1j * evals * t)) @ vecs.conj().T
        s = apply_full_unitary(state, embed_unitary(u, state.layout, acts_on))
        states.append(s)
        reports.append(correlation_report(s))
    trace = EvolutionTrace(times, reports, states, acts_on)
    inv = invariant_entropies(state.labels, acts_on)
    for subset in inv.invariant_entropy_subsets:
        series = trace.entropy_series(subset)
        trace.invariant_drift[subset_name(subset)] = float(np.max(np.abs(series - series[0])))
    return trace


@dataclass
class TraceCheck:
    """Per-time residuals of an identity plus any inequality violations found."""

    name: str
    times: np.ndarray
    residuals: np.ndarray
    tolerance: float
    series: dict[str, np.ndarray] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return float(np.max(np.abs(self.residuals))) if self.residuals.size else 0.0

    @property
    def holds(self) -> bool:
        return not self.violations and self.max_residual <= self.tolerance


def _systems(trace: EvolutionTrace, systems, n: int) -> list[tuple[str, ...]]:
    layout = trace.layout
    if systems is None:
        if len(layout) != n:
            raise PreconditionViolated(f"expected {n} subsystems, layout has {layout.labels}; pass systems=")
        systems = [[lab] for lab in layout.labels]
    systems = [layout.canonical([s] if isinstance(s, (str, int)) else s) for s in systems]
    if len(systems) != n:
        raise PreconditionViolated(f"expected {n} systems, got {len(systems)}")
    return systems


def check_three_system_identity(trace: EvolutionTrace, systems=None) -> TraceCheck:
    """Check ``I12(0) - I12(t) = E_{3{12}}(t) - I23(t)`` and ``I12(t) <= I12(0)``.

    ``systems`` names the blocks playing 1, 2, 3 (default: the three layout
    labels). System 3 must start uncorrelated with ``{12}``.
    """
    s1, s2, s3 = _systems(trace, systems, 3)
    e3_12 = trace.series([s3, s1 + s2])
    if e3_12[0] > UNCORRELATED_TOL:
        raise PreconditionViolated(f"system 3 is initially correlated with {{12}}: E = {e3_12[0]:.3e}")
    i12 = trace.series([s1, s2])
    i23 = trace.series([s2, s3])
    residuals = (i12[0] - i12) - (e3_12 - i23)
    check = TraceCheck(
        "three_system_identity",
        trace.times,
        residuals,
        RESIDUAL_TOL,
        series={"I_12": i12, "I_23": i23, "E_3{12}": e3_12},
    )
    for t, v in zip(trace.times, i12):
        if v > i12[0] + MI_TOL:
            check.violations.append(f"I_12 increased at t={t:.6g}: {v:.12g} > {i12[0]:.12g}")
    return check


def check_total_correlation_additivity(trace: EvolutionTrace, systems=None) -> TraceCheck:
    """Check ``I1234(t) = I1234(0) + I23(t)`` and ``I1234(t) >= I1234(0)``.

    ``I1234`` is the total correlation over all elementary subsystems and
    ``I23`` the total correlation inside systems 2 and 3 together.
    Preconditions: ``{12}`` uncorrelated with ``{34}`` and 2 uncorrelated
    with 3 at the first recorded time.
    """
    s1, s2, s3, s4 = _systems(trace, systems, 4)
    e_pairs = trace.series([s1 + s2, s3 + s4])
    if e_pairs[0] > UNCORRELATED_TOL:
        raise PreconditionViolated(f"{{12}} and {{34}} are initially correlated: E = {e_pairs[0]:.3e}")
    i_total = trace.internal_series(s1 + s2 + s3 + s4)
    i23 = trace.internal_series(s2 + s3)
    if i23[0] > UNCORRELATED_TOL:
        raise PreconditionViolated(f"systems 2 and 3 are initially correlated: I = {i23[0]:.3e}")
    residuals = i_total - i_total[0] - i23
    check = TraceCheck(
        "total_correlation_additivity",
        trace.times,
        residuals,
        RESIDUAL_TOL,
        series={"I_total": i_total, "I_23": i23, "E_{12}{34}": e_pairs},
    )
    for t, v in zip(trace.times, i_total):
        if v < i_total[0] - MI_TOL:
            check.violations.append(f"total correlation fell at t={t:.6g}: {v:.12g} < {i_total[0]:.12g}")
    return check


@dataclass
class ExtremesReport:
    mixed_max_correlation: float
    entangled_max_increase: float
    entangled_initial: float
    product_max_correlation: float
    trials: int

    @property
    def holds(self) -> bool:
        return self.mixed_max_correlation <= MI_TOL and self.entangled_max_increase <= MI_TOL


def check_initial_state_extremes(
    layout: SubsystemLayout,
    trials: int = 30,
    times: Sequence[float] | None = None,
    rng_seed=0,
) -> ExtremesReport:
    """Sweep random joint Hamiltonians over the two limiting initial states.

    An uncorrelated, maximally mixed start can never acquire correlation; a
    maximally correlated pure start can only lose it. A pure product start is
    run alongside as a control whose correlation does grow.
    """
    if len(layout) != 2:
        raise PreconditionViolated("initial-state extremes need a two-system layout")
    times = _check_times(np.linspace(0.1, 3.0, 10) if times is None else times)
    rng = rng_from(rng_seed)
    d1, d2 = layout.dims
    mixed = mixed_state(np.eye(layout.dim) / layout.dim, layout)
    k = min(d1, d2)
    amps = np.zeros(layout.dim, dtype=complex)
    for i in range(k):
        amps[i * d2 + i] = 1.0
    entangled = pure_state(amps, layout)
    prod_state = product(
        [pure_state(np.eye(d1)[0], layout.sub([layout.labels[0]])), pure_state(np.eye(d2)[0], layout.sub([layout.labels[1]]))]
    )
    blocks = [[layout.labels[0]], [layout.labels[1]]]
    mixed_max = ent_increase = prod_max = 0.0
    times_e = times if times[0] == 0 else np.concatenate([[0.0], times])
    ent0 = None
    for _ in range(trials):
        h = random_hermitian(layout.dim, rng)
        tm = evolve_trace(mixed, h, layout.labels, times)
        mixed_max = max(mixed_max, float(np.max(tm.series(blocks))))
        te = evolve_trace(entangled, h, layout.labels, times_e)
        ie = te.series(blocks)
        ent0 = ie[0]
        ent_increase = max(ent_increase, float(np.max(ie - ie[0])))
        tp = evolve_trace(prod_state, h, layout.labels, times)
        prod_max = max(prod_max, float(np.max(tp.series(blocks))))
    return ExtremesReport(mixed_max, ent_increase, float(ent0), prod_max, trials)

