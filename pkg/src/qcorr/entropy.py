"""Von Neumann entropy and the entropic correlation measures built on it.

All quantities are in nats. The index of correlation of blocks ``X1..Xk`` is
``sum S(Xi) - S(X1 ∪ ... ∪ Xk)``; whether it is read as an internal or an
external correlation depends only on how the blocks were chosen.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import InvalidDensity, MixedState, OverlappingBlocks, UnknownLabel
from .linalg import SubsystemLayout, as_matrix, hermitian_eigenvalues
from .quantum_state import NORM_TOL, QuantumState, purity, reduce

NEGATIVE_EIGENVALUE_TOL = 1e-10
MI_TOL = 1e-9
PURITY_TOL = 1e-8


def entropy_from_spectrum(p: Iterable[float]) -> float:
    """``-sum p ln p`` with ``0 ln 0 = 0``; tiny negative entries are clamped."""
    p = np.clip(np.asarray(list(p), dtype=float), 0.0, None)
    nz = p[p > 0]
    return float(max(-np.sum(nz * np.log(nz)), 0.0))


def von_neumann_entropy(rho) -> float:
    """``S = -Tr ρ ln ρ`` of a density matrix, in nats.

    Raises :class:`InvalidDensity` if the trace differs from one by more
    than 1e-10 or an eigenvalue is below -1e-10.
    """
    rho = as_matrix(rho)
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > NORM_TOL:
        raise InvalidDensity(f"trace {tr:.12g} differs from 1")
    evals = hermitian_eigenvalues(rho)
    if evals[0] < -NEGATIVE_EIGENVALUE_TOL:
        raise InvalidDensity(f"negative eigenvalue {evals[0]:.3e}")
    return entropy_from_spectrum(evals)


def _pure_subset_entropy(state: QuantumState, subset: Sequence[str]) -> float:
    layout = state.layout
    keep = sorted(layout.positions(subset))
    rest = [p for p in range(len(layout)) if p not in keep]
    if not rest:
        return 0.0
    t = state.vector.reshape(layout.dims).transpose(keep + rest)
    t = t.reshape(layout.subdim(subset), -1)
    sv = np.linalg.svd(t, compute_uv=False)
    return entropy_from_spectrum(sv**2)


def subset_entropy(state: QuantumState, subset: Iterable) -> float:
    """Entropy of the reduced state on ``subset``."""
    subset = list(subset)
    if not subset:
        raise UnknownLabel("subset must be non-empty")
    state.layout.positions(subset)
    if state.is_pure:
        return _pure_subset_entropy(state, subset)
    return von_neumann_entropy(reduce(state, subset).rho)


def _normalise_blocks(layout: SubsystemLayout, blocks) -> list[tuple[str, ...]]:
    out, seen = [], set()
    for b in blocks:
        if isinstance(b, (str, int)):
            b = [b]
        b = layout.canonical(b)
        if not b:
            raise OverlappingBlocks("blocks must be non-empty")
        if seen & set(b):
            raise OverlappingBlocks(f"label(s) {sorted(seen & set(b))} appear in more than one block")
        seen |= set(b)
        out.append(b)
    return out


def index_of_correlation(state: QuantumState, blocks) -> float:
    """``sum S(block) - S(union)`` over two or more disjoint blocks."""
    blocks = _normalise_blocks(state.layout, blocks)
    if len(blocks) < 2:
        raise OverlappingBlocks("index of correlation needs at least two blocks")
    union = [lab for b in blocks for lab in b]
    return sum(subset_entropy(state, b) for b in blocks) - subset_entropy(state, union)


def mutual_information(state: QuantumState, block_a, block_b) -> float:
    return index_of_correlation(state, [block_a, block_b])


def entropy_of_entanglement(state: QuantumState, cut: Iterable) -> float:
    """Entropy of one side of a bipartition of a globally pure state."""
    if not state.is_pure and abs(purity(state) - 1.0) > PURITY_TOL:
        raise MixedState("entropy of entanglement needs a globally pure state")
    return subset_entropy(state, cut)


class BoundCheck(NamedTuple):
    value: float
    bound: float
    holds: bool


class SSACheck(NamedTuple):
    external: float
    pairwise: float
    holds: bool


def check_mi_bound(state: QuantumState, block_a, block_b) -> BoundCheck:
    """``I_ab <= 2 min(S_a, S_b)``."""
    blocks = _normalise_blocks(state.layout, [block_a, block_b])
    value = index_of_correlation(state, blocks)
    bound = 2 * min(subset_entropy(state, blocks[0]), subset_entropy(state, blocks[1]))
    return BoundCheck(value, bound, value <= bound + MI_TOL)


def check_ssa(state: QuantumState, s1, s2, s3) -> SSACheck:
    """Strong subadditivity in the form ``E_{s3,{s1 s2}} >= I_{s2,s3}``."""
    b1, b2, b3 = _normalise_blocks(state.layout, [s1, s2, s3])
    external = index_of_correlation(state, [b3, b1 + b2])
    pairwise = index_of_correlation(state, [b2, b3])
    return SSACheck(external, pairwise, external - pairwise >= -MI_TOL)


def _label_text(labels: Sequence[str]) -> str:
    sep = "" if all(len(lab) == 1 for lab in labels) else ","
    return sep.join(labels)


def subset_name(labels: Sequence[str]) -> str:
    return "S_" + _label_text(labels)


def correlation_name(blocks: Sequence[Sequence[str]]) -> str:
    """``I_12`` for singleton blocks, ``E_1{234}`` / ``E_{23}4`` when a block is composite."""
    if all(len(b) == 1 for b in blocks):
        return "I_" + _label_text([b[0] for b in blocks])
    parts = [b[0] if len(b) == 1 else "{" + _label_text(b) + "}" for b in blocks]
    sep = "" if all(len(lab) == 1 for b in blocks for lab in b) else ","
    return "E_" + sep.join(parts)


def nonempty_subsets(labels: Sequence[str]) -> list[tuple[str, ...]]:
    return [c for k in range(1, len(labels) + 1) for c in combinations(labels, k)]


@dataclass
class CorrelationReport:
    """Every subset entropy of a state plus the derived correlations.

    ``subset_entropies`` is keyed by label tuples in layout order. ``derived``
    holds the total correlation ``I_X`` of every subset with two or more
    members and the external correlation ``E`` of every pair of disjoint
    subsets with at least one composite member.
    """

    layout: SubsystemLayout
    subset_entropies: dict[tuple[str, ...], float]
    derived: dict[str, float] = field(default_factory=dict)
    state_id: str | None = None

    def entropy(self, labels) -> float:
        key = self.layout.canonical([labels] if isinstance(labels, (str, int)) else labels)
        return self.subset_entropies[key]

    def index(self, blocks) -> float:
        blocks = _normalise_blocks(self.layout, blocks)
        union = [lab for b in blocks for lab in b]
        return sum(self.entropy(b) for b in blocks) - self.entropy(union)

    def internal(self, labels) -> float:
        """Total correlation among the elementary members of ``labels``."""
        labels = self.layout.canonical(labels)
        if len(labels) < 2:
            return 0.0
        return self.index([[lab] for lab in labels])

    def named(self) -> dict[str, float]:
        out = {subset_name(k): v for k, v in self.subset_entropies.items()}
        out.update(self.derived)
        return out


def correlation_report(state: QuantumState, state_id: str | None = None) -> CorrelationReport:
    labels = state.labels
    entropies = {s: subset_entropy(state, s) for s in nonempty_subsets(labels)}
    report = CorrelationReport(state.layout, entropies, state_id=state_id)
    for s in entropies:
        if len(s) >= 2:
            report.derived[correlation_name([[lab] for lab in s])] = report.internal(s)
    subsets = list(entropies)
    for i, a in enumerate(subsets):
        for b in subsets[i + 1:]:
            if set(a) & set(b) or (len(a) == 1 and len(b) == 1):
                continue
            pair = sorted([a, b], key=lambda x: state.layout.positions(x)[0])
            report.derived[correlation_name(pair)] = report.index(pair)
    return report

