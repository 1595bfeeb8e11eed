"""Two atoms passing in turn through a single-mode lossless cavity.

Layout is atom 1 ⊗ field ⊗ atom 2 with labels ``A1``, ``F``, ``A2``. Atomic
level 0 is the ground state and 1 the excited state; the field is truncated
to Fock levels ``0 .. fock_cutoff - 1``. Each transit is resonant
Jaynes-Cummings evolution ``g(a σ+ + a† σ-)`` between one atom and the field.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import EvolutionTrace, TraceCheck, check_three_system_identity, evolve_trace, propagator
from .entropy import correlation_report
from .errors import CutoffExceeded
from .linalg import SubsystemLayout, embed_operator, kron
from .quantum_state import QuantumState, apply_full_unitary, basis_state, density

CUTOFF_TOL = 1e-8
ATOM1, FIELD, ATOM2 = "A1", "F", "A2"


@dataclass(frozen=True)
class CavitySystem:
    fock_cutoff: int = 3
    coupling: float = 1.0

    def __post_init__(self):
        if self.fock_cutoff < 2:
            raise ValueError(f"fock_cutoff must be >= 2, got {self.fock_cutoff}")

    @property
    def layout(self) -> SubsystemLayout:
        return SubsystemLayout([2, self.fock_cutoff, 2], [ATOM1, FIELD, ATOM2])


def annihilation(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n)), k=1).astype(complex)


SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()


def _atom_label(which_atom: int) -> str:
    if which_atom not in (1, 2):
        raise ValueError(f"which_atom must be 1 or 2, got {which_atom}")
    return ATOM1 if which_atom == 1 else ATOM2


def jc_hamiltonian(system: CavitySystem, which_atom: int) -> np.ndarray:
    """Full-space interaction Hamiltonian coupling one atom to the field."""
    a = annihilation(system.fock_cutoff)
    atom = _atom_label(which_atom)
    h = system.coupling * (kron(SIGMA_PLUS, a) + kron(SIGMA_MINUS, a.conj().T))
    return embed_operator(h, system.layout, [atom, FIELD])


def number_operator(system: CavitySystem) -> np.ndarray:
    """Photon number plus the number of excited atoms."""
    n = system.fock_cutoff
    layout = system.layout
    excited = SIGMA_PLUS @ SIGMA_MINUS
    return (
        embed_operator(np.diag(np.arange(n)).astype(complex), layout, [FIELD])
        + embed_operator(excited, layout, [ATOM1])
        + embed_operator(excited, layout, [ATOM2])
    )


def top_fock_population(state: QuantumState, system: CavitySystem) -> float:
    top = np.zeros((system.fock_cutoff, system.fock_cutoff), dtype=complex)
    top[-1, -1] = 1.0
    proj = embed_operator(top, system.layout, [FIELD])
    return float(np.real(np.trace(proj @ density(state))))


def expectation(state: QuantumState, op: np.ndarray) -> float:
    if state.is_pure:
        return float(np.real(np.vdot(state.vector, op @ state.vector)))
    return float(np.real(np.trace(op @ state.rho)))


def _check_cutoff(state: QuantumState, system: CavitySystem) -> float:
    pop = top_fock_population(state, system)
    if pop > CUTOFF_TOL:
        raise CutoffExceeded(f"top Fock level population {pop:.3e} exceeds {CUTOFF_TOL:.0e}; raise fock_cutoff")
    return pop


def transit(state: QuantumState, system: CavitySystem, which_atom: int, duration: float) -> QuantumState:
    """Send one atom through the cavity for ``duration``."""
    if duration < 0:
        raise ValueError("duration must be >= 0")
    u = propagator(jc_hamiltonian(system, which_atom), duration)
    out = apply_full_unitary(state, u)
    _check_cutoff(out, system)
    return out


def initial_state(system: CavitySystem) -> QuantumState:
    """Atom 1 excited, field in vacuum, atom 2 in its ground state."""
    return basis_state([1, 0, 0], system.layout)


STAGE_QUANTITIES = ("S_A1", "S_F", "S_A2", "S_total", "I_A1,F", "I_A1,A2", "I_F,A2", "I_total", "excitation", "top_fock")


def stage_quantities(state: QuantumState, system: CavitySystem) -> dict[str, float]:
    r = correlation_report(state)
    return {
        "S_A1": r.entropy([ATOM1]),
        "S_F": r.entropy([FIELD]),
        "S_A2": r.entropy([ATOM2]),
        "S_total": r.entropy([ATOM1, FIELD, ATOM2]),
        "I_A1,F": r.index([[ATOM1], [FIELD]]),
        "I_A1,A2": r.index([[ATOM1], [ATOM2]]),
        "I_F,A2": r.index([[FIELD], [ATOM2]]),
        "I_total": r.internal([ATOM1, FIELD, ATOM2]),
        "excitation": expectation(state, number_operator(system)),
        "top_fock": top_fock_population(state, system),
    }


@dataclass
class ExchangeReport:
    t1: float
    t2: float
    stages: dict[str, dict[str, float]]
    first_transit: EvolutionTrace
    second_transit: EvolutionTrace
    identity: TraceCheck
    excitation_drift: float
    top_fock_max: float
    a1_entropy_drift: float

    @property
    def final(self) -> dict[str, float]:
        return self.stages["after_second"]


def _sample_times(duration: float, samples: int) -> np.ndarray:
    if duration == 0 or samples < 2:
        return np.array([0.0]) if duration == 0 else np.array([0.0, duration])
    return np.linspace(0.0, duration, samples)


def exchange_protocol(system: CavitySystem, t1: float, t2: float, samples: int = 21) -> ExchangeReport:
    """Atom 1 (excited) transits the vacuum cavity for ``t1``, then atom 2 (ground) for ``t2``.

    Each transit is sampled at ``samples`` evenly spaced times. The second
    transit is checked against the three-system identity with
    (1, 2, 3) = (atom 1, field, atom 2).
    """
    if t1 < 0 or t2 < 0:
        raise ValueError("transit times must be >= 0")
    layout = system.layout
    psi0 = initial_state(system)
    tr1 = evolve_trace(psi0, jc_hamiltonian(system, 1), layout.labels, _sample_times(t1, samples))
    psi1 = tr1.states[-1]
    tr2 = evolve_trace(psi1, jc_hamiltonian(system, 2), layout.labels, _sample_times(t2, samples))
    psi2 = tr2.states[-1]
    n_op = number_operator(system)
    n0 = expectation(psi0, n_op)
    samples_all = tr1.states + tr2.states
    excitation_drift = max(abs(expectation(s, n_op) - n0) for s in samples_all)
    top = max(top_fock_population(s, system) for s in samples_all)
    if top > CUTOFF_TOL:
        raise CutoffExceeded(f"top Fock level population {top:.3e} exceeds {CUTOFF_TOL:.0e}; raise fock_cutoff")
    s_a1 = tr2.entropy_series([ATOM1])
    identity = check_three_system_identity(tr2, systems=[[ATOM1], [FIELD], [ATOM2]])
    return ExchangeReport(
        t1=t1,
        t2=t2,
        stages={
            "initial": stage_quantities(psi0, system),
            "after_first": stage_quantities(psi1, system),
            "after_second": stage_quantities(psi2, system),
        },
        first_transit=tr1,
        second_transit=tr2,
        identity=identity,
        excitation_drift=float(excitation_drift),
        top_fock_max=float(top),
        a1_entropy_drift=float(np.max(np.abs(s_a1 - s_a1[0]))),
    )
