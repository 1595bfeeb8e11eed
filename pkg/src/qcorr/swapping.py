"""Four-qubit entanglement swapping.

Qubits are labelled 1, 2, 3, 4 from left to right and start in
``(a|00> + b|11>)_{12} ⊗ (c|00> + d|11>)_{34}`` with real, non-negative
amplitudes. A Bell measurement on qubits 2 and 3 leaves 1 and 4 in one of
four pure branch states. Bell states are named

    Psi± = (|00> ± |11>)/√2,    Phi± = (|01> ± |10>)/√2.

Iterated swapping (:func:`iterate_swap`) feeds the Schmidt pair produced
by one stage in as the next stage's ``(a, b)``, with a fresh ``(c, d)``
for every stage. For a ``Phi`` outcome the branch ``ad|01> ± bc|10>`` is
brought to the form ``a'|00> + b'|11>`` by a local flip on qubit 4, which
changes no entropy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .entropy import MI_TOL, entropy_from_spectrum, von_neumann_entropy
from .errors import DegenerateBranch
from .linalg import SubsystemLayout, partial_trace
from .quantum_state import (
    ZERO_PROBABILITY,
    QuantumState,
    density,
    product,
    projective_measure,
    pure_state,
    reduce,
)
from .sampling import rng_from

OUTCOMES = ("Psi+", "Psi-", "Phi+", "Phi-")
LAYOUT = SubsystemLayout.qubits(4)
PAIR_14 = SubsystemLayout.qubits(2, ["1", "4"])


@dataclass(frozen=True)
class SwapInput:
    """Real amplitudes of the two initial pairs, normalised on construction."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        vals = (self.a, self.b, self.c, self.d)
        if any(v < 0 or not math.isfinite(v) for v in vals):
            raise ValueError(f"swap amplitudes must be finite and non-negative, got {vals}")
        n1, n2 = math.hypot(self.a, self.b), math.hypot(self.c, self.d)
        if n1 == 0 or n2 == 0:
            raise ValueError("each pair needs a non-zero amplitude")
        object.__setattr__(self, "a", self.a / n1)
        object.__setattr__(self, "b", self.b / n1)
        object.__setattr__(self, "c", self.c / n2)
        object.__setattr__(self, "d", self.d / n2)

    @classmethod
    def from_squares(cls, a2: float, c2: float) -> "SwapInput":
        """Pairs with ``a² = a2`` and ``c² = c2``."""
        for name, v in (("a2", a2), ("c2", c2)):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        return cls(math.sqrt(a2), math.sqrt(1.0 - a2), math.sqrt(c2), math.sqrt(1.0 - c2))

    @property
    def squares(self) -> tuple[float, float, float, float]:
        return self.a**2, self.b**2, self.c**2, self.d**2

    def state(self) -> QuantumState:
        pair12 = pure_state([self.a, 0, 0, self.b], SubsystemLayout.qubits(2, ["1", "2"]))
        pair34 = pure_state([self.c, 0, 0, self.d], SubsystemLayout.qubits(2, ["3", "4"]))
        return product([pair12, pair34])


def bell_vectors() -> dict[str, np.ndarray]:
    s = 1 / math.sqrt(2)
    return {
        "Psi+": np.array([s, 0, 0, s], dtype=complex),
        "Psi-": np.array([s, 0, 0, -s], dtype=complex),
        "Phi+": np.array([0, s, s, 0], dtype=complex),
        "Phi-": np.array([0, s, -s, 0], dtype=complex),
    }


def bell_basis() -> dict[str, np.ndarray]:
    """Rank-one projectors onto the four Bell states, in :data:`OUTCOMES` order."""
    return {k: np.outer(v, v.conj()) for k, v in bell_vectors().items()}


@dataclass
class BellDecomposition:
    """Branch weights and normalised {1,4} branch states.

    ``branches`` maps each outcome to its {1,4} amplitude vector (basis
    ``|00>, |01>, |10>, |11>``), or ``None`` when the branch weight is below
    1e-12; such outcomes are listed in ``degenerate``.
    """

    n_psi: float
    n_phi: float
    branches: dict[str, np.ndarray | None]
    degenerate: list[str] = field(default_factory=list)

    def weight(self, outcome: str) -> float:
        return self.n_psi if outcome.startswith("Psi") else self.n_phi

    def reconstruct(self) -> np.ndarray:
        """The 16-amplitude state ``Σ (n/2)^{1/2} |branch>_14 |Bell>_23`` in 1234 order."""
        out = np.zeros((2, 2, 2, 2), dtype=complex)
        bells = bell_vectors()
        for k in OUTCOMES:
            branch = self.branches[k]
            if branch is None:
                continue
            coeff = math.sqrt(self.weight(k) / 2)
            out += coeff * np.einsum("ad,bc->abcd", branch.reshape(2, 2), bells[k].reshape(2, 2))
        return out.reshape(-1)


def decompose_swap_state(inp: SwapInput) -> BellDecomposition:
    a, b, c, d = inp.a, inp.b, inp.c, inp.d
    n_psi = a**2 * c**2 + b**2 * d**2
    n_phi = a**2 * d**2 + b**2 * c**2
    raw = {
        "Psi+": (n_psi, np.array([a * c, 0, 0, b * d])),
        "Psi-": (n_psi, np.array([a * c, 0, 0, -b * d])),
        "Phi+": (n_phi, np.array([0, a * d, b * c, 0])),
        "Phi-": (n_phi, np.array([0, a * d, -b * c, 0])),
    }
    branches, degenerate = {}, []
    for k, (n, v) in raw.items():
        if n < ZERO_PROBABILITY:
            branches[k] = None
            degenerate.append(k)
        else:
            branches[k] = v.astype(complex) / math.sqrt(n)
    return BellDecomposition(n_psi, n_phi, branches, degenerate)


@dataclass
class SwapOutcome:
    outcome: str
    probability: float
    post_state_14: QuantumState | None
    bias: float
    i14: float

    @property
    def degenerate(self) -> bool:
        return self.post_state_14 is None

    @property
    def rho1(self) -> np.ndarray:
        """Reduced density of qubit 1 after the measurement."""
        if self.post_state_14 is None:
            return np.full((2, 2), np.nan)
        return partial_trace(density(self.post_state_14), PAIR_14, ["1"])


def run_swap(inp: SwapInput, strict: bool = False) -> list[SwapOutcome]:
    """The four measurement branches computed from the closed-form decomposition.

    A branch of zero weight comes back with no post-measurement state, NaN
    bias and zero ``i14``; with ``strict=True`` it raises
    :class:`DegenerateBranch` instead.
    """
    dec = decompose_swap_state(inp)
    if strict and dec.degenerate:
        raise DegenerateBranch(f"zero-weight branches {dec.degenerate} for {inp}")
    a2, b2, c2, d2 = inp.squares
    out = []
    for k in OUTCOMES:
        n = dec.weight(k)
        branch = dec.branches[k]
        if branch is None:
            out.append(SwapOutcome(k, 0.0, None, math.nan, 0.0))
            continue
        p0 = (a2 * c2 if k.startswith("Psi") else a2 * d2) / n
        bias = p0 - 0.5
        i14 = 2 * entropy_from_spectrum([p0, 1 - p0])
        out.append(SwapOutcome(k, n / 2, QuantumState(PAIR_14, vector=branch), bias, i14))
    return out


def run_swap_measured(inp: SwapInput) -> list[SwapOutcome]:
    """Same branches obtained by projecting the full 16-dim state numerically."""
    state = inp.state()
    projectors = list(bell_basis().values())
    out = []
    for k, m in zip(OUTCOMES, projective_measure(state, projectors, ["2", "3"])):
        if m.empty:
            out.append(SwapOutcome(k, m.probability, None, math.nan, 0.0))
            continue
        post = reduce(m.state, ["1", "4"])
        rho1 = partial_trace(post.rho, post.layout, ["1"])
        s1 = von_neumann_entropy(rho1)
        out.append(SwapOutcome(k, m.probability, post, float(rho1[0, 0].real) - 0.5, 2 * s1))
    return out


def pair_correlation(p: float) -> float:
    """Mutual information of ``√p|00> + √(1-p)|11>``."""
    return 2 * entropy_from_spectrum([p, 1 - p])


@dataclass
class SwapBoundReport:
    i12: float
    i34: float
    outcomes: list[SwapOutcome]
    eps1: float
    eps3: float
    ordering_assumed: bool
    tolerance: float = MI_TOL

    @property
    def bound(self) -> float:
        return min(self.i12, self.i34)

    def outcome_holds(self, o: SwapOutcome) -> bool:
        return o.i14 <= self.bound + self.tolerance

    @property
    def holds(self) -> bool:
        """Per-outcome bound ``I14^M <= min(I12, I34)`` for every outcome."""
        return all(self.outcome_holds(o) for o in self.outcomes)

    @property
    def mean_i14(self) -> float:
        return sum(o.probability * o.i14 for o in self.outcomes)

    @property
    def holds_on_average(self) -> bool:
        return self.mean_i14 <= self.bound + self.tolerance

    @property
    def bias_exceeds(self) -> bool | None:
        """``ε1^M > ε3`` on the Psi outcomes, or ``None`` off the ordering ``c² ≥ a² > b² > d²``."""
        if not self.ordering_assumed:
            return None
        return all(o.bias > self.eps3 for o in self.outcomes if o.outcome.startswith("Psi"))


def ordering_assumptions(inp: SwapInput) -> bool:
    """``c² ≥ a²``, ``a² > b²`` and both ``a², b² > d²``."""
    a2, b2, c2, d2 = inp.squares
    return c2 >= a2 and a2 > b2 and a2 > d2 and b2 > d2


def check_swap_bound(inp: SwapInput) -> SwapBoundReport:
    a2, b2, c2, d2 = inp.squares
    return SwapBoundReport(
        i12=pair_correlation(a2),
        i34=pair_correlation(c2),
        outcomes=run_swap(inp),
        eps1=a2 - 0.5,
        eps3=c2 - 0.5,
        ordering_assumed=ordering_assumptions(inp),
    )


@dataclass
class SwapStage:
    stage: int
    outcome: str
    probability: float
    a2: float
    c2: float
    i_before: float
    i14: float


@dataclass
class IterationReport:
    stages: list[SwapStage]
    tolerance: float = MI_TOL

    @property
    def correlations(self) -> list[float]:
        return [s.i14 for s in self.stages]

    @property
    def monotone(self) -> bool:
        """Each stage ends with no more correlation than its input pair carried."""
        return all(s.i14 <= s.i_before + self.tolerance for s in self.stages)


def iterate_swap(chain: Sequence[SwapInput], outcome: str = "Psi+", seed=None) -> IterationReport:
    """Swap repeatedly along ``chain``.

    Stage 0 uses ``chain[0]`` as given; stage ``k > 0`` pairs the Schmidt
    coefficients left by stage ``k - 1`` with ``chain[k]``'s ``(c, d)``.
    ``outcome`` fixes the Bell result at every stage, or ``"sample"`` draws
    it with the Born probabilities from a generator seeded by ``seed``.
    """
    chain = list(chain)
    if len(chain) < 2:
        raise ValueError("iterated swapping needs a chain of at least two links")
    if outcome != "sample" and outcome not in OUTCOMES:
        raise ValueError(f"outcome must be one of {OUTCOMES} or 'sample', got {outcome!r}")
    if outcome == "sample" and seed is None:
        raise ValueError("sampled iteration needs an explicit seed")
    rng = rng_from(seed) if outcome == "sample" else None
    stages = []
    inp = chain[0]
    for k in range(len(chain)):
        if k > 0:
            inp = SwapInput(a, b, chain[k].c, chain[k].d)
        results = run_swap(inp)
        if rng is not None:
            probs = np.array([o.probability for o in results])
            choice = results[int(rng.choice(4, p=probs / probs.sum()))]
        else:
            choice = results[OUTCOMES.index(outcome)]
        if choice.degenerate:
            raise DegenerateBranch(f"stage {k}: outcome {choice.outcome} has zero probability")
        a2n = 0.5 + choice.bias
        if min(a2n, 1 - a2n) < ZERO_PROBABILITY:
            raise DegenerateBranch(f"stage {k}: Schmidt coefficient underflow (a'^2 = {a2n!r})")
        a2, _, c2, _ = inp.squares
        stages.append(SwapStage(k, choice.outcome, choice.probability, a2, c2, pair_correlation(a2), choice.i14))
        a, b = math.sqrt(a2n), math.sqrt(1 - a2n)
    return IterationReport(stages)
