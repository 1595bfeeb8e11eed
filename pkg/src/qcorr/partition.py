"""Partitions of a multipartite system into blocks.

A partition splits the total correlation into the correlation internal to
each block plus the external correlation between blocks. A unitary that acts
only on ``interacting`` subsystems leaves the entropy of any subset that
either contains ``interacting`` or avoids it entirely untouched; correlations
built only from such subsets are invariant too.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .entropy import _normalise_blocks, correlation_name, nonempty_subsets, subset_entropy
from .errors import CoverageError, OverlappingBlocks, UnknownLabel
from .linalg import SubsystemLayout, embed_unitary
from .quantum_state import QuantumState, apply_full_unitary
from .sampling import random_unitary, rng_from

INVARIANCE_TOL = 1e-9


@dataclass(frozen=True)
class Partition:
    """Disjoint, non-empty blocks of labels covering ``universe``."""

    blocks: tuple[tuple[str, ...], ...]
    universe: tuple[str, ...]

    def __init__(self, blocks: Iterable[Iterable], universe: Iterable | None = None):
        blocks = tuple(tuple(str(lab) for lab in ([b] if isinstance(b, (str, int)) else b)) for b in blocks)
        if any(not b for b in blocks):
            raise OverlappingBlocks("partition blocks must be non-empty")
        flat = [lab for b in blocks for lab in b]
        if len(set(flat)) != len(flat):
            raise OverlappingBlocks(f"partition blocks overlap: {blocks}")
        universe = tuple(flat) if universe is None else tuple(str(lab) for lab in universe)
        if set(flat) != set(universe):
            raise CoverageError(f"blocks {blocks} do not cover universe {universe}")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "universe", universe)

    @classmethod
    def parse(cls, text: str, universe: Iterable | None = None) -> "Partition":
        """``"12|34"`` style notation for single-character labels."""
        return cls([list(part) for part in text.split("|")], universe)

    def __str__(self) -> str:
        return "|".join("".join(b) for b in self.blocks)


@dataclass
class Decomposition:
    internal: dict[tuple[str, ...], float]
    external: float
    total: float


def _elementary_groups(layout: SubsystemLayout, elementary) -> list[tuple[str, ...]]:
    if elementary is None:
        return [(lab,) for lab in layout.labels]
    groups = _normalise_blocks(layout, elementary)
    if set(lab for g in groups for lab in g) != set(layout.labels):
        raise CoverageError("elementary systems must cover every subsystem")
    return groups


def decompose(state: QuantumState, partition: Partition, elementary=None) -> Decomposition:
    """Split the total correlation of ``state`` along ``partition``.

    ``elementary`` optionally groups labels into composite elementary
    systems (each group must sit inside a single block); by default every
    label is elementary. The total correlation is the index of correlation
    over the elementary systems, and ``total == sum(internal) + external``.
    """
    layout = state.layout
    if set(partition.universe) != set(layout.labels):
        raise CoverageError(f"partition covers {partition.universe}, state has {layout.labels}")
    blocks = [layout.canonical(b) for b in partition.blocks]
    groups = _elementary_groups(layout, elementary)
    s_all = subset_entropy(state, layout.labels)
    s_group = {g: subset_entropy(state, g) for g in groups}
    internal = {}
    for b in blocks:
        inside = [g for g in groups if set(g) <= set(b)]
        if sum(len(g) for g in inside) != len(b):
            raise CoverageError(f"an elementary system straddles block {b}")
        internal[b] = sum(s_group[g] for g in inside) - subset_entropy(state, b) if len(inside) > 1 else 0.0
    s_blocks = {b: subset_entropy(state, b) for b in blocks}
    external = sum(s_blocks.values()) - s_all if len(blocks) > 1 else 0.0
    total = sum(s_group.values()) - s_all
    return Decomposition(internal, external, total)


@dataclass
class InvariantSet:
    interacting: tuple[str, ...]
    invariant_entropy_subsets: list[tuple[str, ...]]
    invariant_correlations: list[tuple[tuple[str, ...], ...]]

    def correlation_names(self) -> list[str]:
        return [correlation_name(c) for c in self.invariant_correlations]


def invariant_entropies(labels: Sequence, interacting: Iterable) -> InvariantSet:
    """Subsets whose entropy no unitary localised on ``interacting`` can change.

    ``invariant_correlations`` lists the two-block correlations whose blocks
    and union are all invariant subsets.
    """
    universe = tuple(str(lab) for lab in labels)
    inter = tuple(str(lab) for lab in interacting)
    if not inter:
        raise UnknownLabel("interacting subset must be non-empty")
    missing = [lab for lab in inter if lab not in universe]
    if missing:
        raise UnknownLabel(f"unknown labels {missing}; universe is {universe}")
    ins = set(inter)
    subsets = [s for s in nonempty_subsets(universe) if ins <= set(s) or not ins & set(s)]
    inv = set(subsets)
    order = {lab: i for i, lab in enumerate(universe)}
    corrs = []
    for i, a in enumerate(subsets):
        for b in subsets[i + 1:]:
            if set(a) & set(b):
                continue
            union = tuple(sorted(set(a) | set(b), key=order.get))
            if union in inv:
                corrs.append(tuple(sorted([a, b], key=lambda x: order[x[0]])))
    return InvariantSet(tuple(sorted(ins, key=order.get)), subsets, corrs)


@dataclass
class InvarianceReport:
    trials: int
    entropy_drift: dict[tuple[str, ...], float]
    correlation_drift: dict[str, float]
    control_drift: dict[tuple[str, ...], float] = field(default_factory=dict)
    tolerance: float = INVARIANCE_TOL

    @property
    def max_entropy_drift(self) -> float:
        return max(self.entropy_drift.values(), default=0.0)

    @property
    def max_correlation_drift(self) -> float:
        return max(self.correlation_drift.values(), default=0.0)

    @property
    def holds(self) -> bool:
        return self.max_entropy_drift <= self.tolerance and self.max_correlation_drift <= self.tolerance


def verify_invariance(
    state: QuantumState,
    interacting: Sequence,
    trials: int,
    rng_seed=0,
    unitaries: Iterable | None = None,
) -> InvarianceReport:
    """Apply random unitaries on ``interacting`` and measure entropy drifts.

    Subsets outside the invariant set are tracked in ``control_drift`` so a
    caller can confirm that they do move. Pass ``unitaries`` to replace the
    Haar-random draws.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    layout = state.layout
    inv = invariant_entropies(layout.labels, interacting)
    all_subsets = nonempty_subsets(layout.labels)
    before = {s: subset_entropy(state, s) for s in all_subsets}

    def corr(values, blocks):
        union = [lab for b in blocks for lab in b]
        return sum(values[b] for b in blocks) - values[layout.canonical(union)]

    names = inv.correlation_names()
    corr_before = {n: corr(before, c) for n, c in zip(names, inv.invariant_correlations)}
    if unitaries is None:
        rng = rng_from(rng_seed)
        d = layout.subdim(interacting)
        unitaries = (random_unitary(d, rng) for _ in range(trials))
    drift = {s: 0.0 for s in all_subsets}
    corr_drift = {n: 0.0 for n in names}
    count = 0
    for u in unitaries:
        after_state = apply_full_unitary(state, embed_unitary(u, layout, interacting))
        after = {s: subset_entropy(after_state, s) for s in all_subsets}
        for s in all_subsets:
            drift[s] = max(drift[s], abs(after[s] - before[s]))
        for n, c in zip(names, inv.invariant_correlations):
            corr_drift[n] = max(corr_drift[n], abs(corr(after, c) - corr_before[n]))
        count += 1
        if count >= trials:
            break
    inv_set = set(inv.invariant_entropy_subsets)
    return InvarianceReport(
        trials=count,
        entropy_drift={s: drift[s] for s in inv.invariant_entropy_subsets},
        correlation_drift=corr_drift,
        control_drift={s: v for s, v in drift.items() if s not in inv_set},
    )

