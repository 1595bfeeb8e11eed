"""Pure and mixed states over labelled subsystems."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateLabel,
    IncompleteProjectorSet,
    InvalidDensity,
    NotNormalized,
    ZeroVector,
)
from .linalg import (
    HERMITIAN_TOL,
    SubsystemLayout,
    as_matrix,
    check_hermitian,
    embed_operator,
    embed_unitary,
    hermitian_eigh,
    hermitian_eigenvalues,
    partial_trace,
)

NORM_TOL = 1e-10
RENORMALIZE_TOL = 1e-6
PROJECTOR_TOL = 1e-10
ZERO_PROBABILITY = 1e-12


@dataclass(frozen=True, eq=False)
class QuantumState:
    """A state on ``layout``; exactly one of ``vector`` / ``rho`` is set."""

    layout: SubsystemLayout
    vector: np.ndarray | None = None
    rho: np.ndarray | None = None

    @property
    def is_pure(self) -> bool:
        return self.vector is not None

    @property
    def labels(self) -> tuple[str, ...]:
        return self.layout.labels

    @property
    def dim(self) -> int:
        return self.layout.dim

    def density(self) -> np.ndarray:
        return density(self)

    def __repr__(self) -> str:
        kind = "pure" if self.is_pure else "mixed"
        return f"QuantumState({kind}, labels={self.labels}, dims={self.layout.dims})"


def _layout(layout) -> SubsystemLayout:
    if isinstance(layout, SubsystemLayout):
        return layout
    return SubsystemLayout(layout)


def pure_state(amplitudes, layout, normalize: bool = True) -> QuantumState:
    """Pure state from computational-basis amplitudes.

    Any non-zero vector is rescaled to unit norm. With ``normalize=False``
    only vectors within 1e-6 of unit norm are accepted (and then rescaled
    exactly), which guards hand-entered coefficients without hiding typos.
    """
    layout = _layout(layout)
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if v.size != layout.dim:
        raise DimensionMismatch(f"{v.size} amplitudes for layout of dimension {layout.dim}")
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ZeroVector("cannot build a state from the zero vector")
    if not normalize and abs(norm - 1.0) > RENORMALIZE_TOL:
        raise NotNormalized(f"norm {norm:.9g} is not within {RENORMALIZE_TOL:.0e} of 1")
    v = v / norm
    v.setflags(write=False)
    return QuantumState(layout, vector=v)


def mixed_state(rho, layout) -> QuantumState:
    """Mixed state from a density matrix, validated against the state invariants."""
    layout = _layout(layout)
    rho = as_matrix(rho)
    if rho.shape != (layout.dim, layout.dim):
        raise DimensionMismatch(f"density shape {rho.shape} for layout of dimension {layout.dim}")
    check_hermitian(rho)
    validate_density(rho)
    rho = 0.5 * (rho + rho.conj().T)
    rho.setflags(write=False)
    return QuantumState(layout, rho=rho)


def validate_density(rho, tol: float = NORM_TOL) -> np.ndarray:
    """Raise :class:`InvalidDensity` unless ``rho`` has unit trace and no negative eigenvalues."""
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > tol:
        raise InvalidDensity(f"trace {tr:.12g} differs from 1")
    evals = hermitian_eigenvalues(rho)
    if evals[0] < -tol:
        raise InvalidDensity(f"negative eigenvalue {evals[0]:.3e}")
    return evals


def density(state: QuantumState) -> np.ndarray:
    """|ψ⟩⟨ψ| for pure states, the stored matrix for mixed ones."""
    if state.is_pure:
        v = state.vector
        return np.outer(v, v.conj())
    return np.array(state.rho)


def product(states: Sequence[QuantumState]) -> QuantumState:
    """Tensor product; labels are concatenated in the order given."""
    states = list(states)
    if not states:
        raise DimensionMismatch("product of no states")
    layout = states[0].layout
    for s in states[1:]:
        clash = set(layout.labels) & set(s.labels)
        if clash:
            raise DuplicateLabel(f"labels {sorted(clash)} appear in more than one factor")
        layout = layout.concat(s.layout)
    if all(s.is_pure for s in states):
        v = states[0].vector
        for s in states[1:]:
            v = np.kron(v, s.vector)
        return QuantumState(layout, vector=v)
    rho = density(states[0])
    for s in states[1:]:
        rho = np.kron(rho, density(s))
    return QuantumState(layout, rho=rho)


def apply_unitary(state: QuantumState, u, acts_on: Sequence) -> QuantumState:
    """Evolve ``state`` by ``u`` acting on the subsystems ``acts_on``."""
    full = embed_unitary(u, state.layout, acts_on)
    return apply_full_unitary(state, full)


def apply_full_unitary(state: QuantumState, full: np.ndarray) -> QuantumState:
    if state.is_pure:
        return QuantumState(state.layout, vector=full @ state.vector)
    return QuantumState(state.layout, rho=full @ state.rho @ full.conj().T)


def reduce(state: QuantumState, keep: Iterable) -> QuantumState:
    """Reduced (generally mixed) state on ``keep``."""
    keep = list(keep)
    sub = state.layout.sub(keep)
    if len(sub) == len(state.layout):
        return state
    return QuantumState(sub, rho=partial_trace(density(state), state.layout, keep))


def discard(state: QuantumState, labels: Iterable) -> QuantumState:
    """Trace out ``labels``."""
    drop = set(state.layout.canonical(labels))
    return reduce(state, [lab for lab in state.labels if lab not in drop])


def purify_if_pure(state: QuantumState, tol: float = 1e-10) -> QuantumState:
    """Return a pure representative when ``state`` is rank one (up to ``tol``)."""
    if state.is_pure:
        return state
    evals, vecs = hermitian_eigh(state.rho)
    if abs(evals[-1] - 1.0) > tol:
        return state
    v = vecs[:, -1]
    k = int(np.argmax(np.abs(v)))
    v = v * (abs(v[k]) / v[k])
    return QuantumState(state.layout, vector=v / np.linalg.norm(v))


def purity(state: QuantumState) -> float:
    if state.is_pure:
        return 1.0
    return float(np.real(np.trace(state.rho @ state.rho)))


@dataclass(frozen=True)
class MeasurementOutcome:
    """One branch of a projective measurement.

    ``state`` is the renormalised post-measurement state of the whole system,
    or ``None`` when the branch has probability below 1e-12 (``empty``).
    """

    index: int
    probability: float
    state: QuantumState | None

    @property
    def empty(self) -> bool:
        return self.state is None


def check_projectors(projectors, dim: int, tol: float = PROJECTOR_TOL) -> list[np.ndarray]:
    ps = [as_matrix(p) for p in projectors]
    if not ps:
        raise IncompleteProjectorSet("no projectors given")
    total = np.zeros((dim, dim), dtype=complex)
    for k, p in enumerate(ps):
        if p.shape != (dim, dim):
            raise DimensionMismatch(f"projector {k} has shape {p.shape}, expected {(dim, dim)}")
        check_hermitian(p, max(tol, HERMITIAN_TOL))
        if np.max(np.abs(p @ p - p)) > tol:
            raise IncompleteProjectorSet(f"projector {k} is not idempotent")
        total += p
    err = float(np.max(np.abs(total - np.eye(dim))))
    if err > tol:
        raise IncompleteProjectorSet(f"projectors sum to identity only within {err:.3e}")
    return ps


def projective_measure(state: QuantumState, projectors, acts_on: Sequence) -> list[MeasurementOutcome]:
    """Born-rule branches of a complete projective measurement on ``acts_on``."""
    d_sub = state.layout.subdim(acts_on)
    ps = check_projectors(projectors, d_sub)
    out = []
    for k, p in enumerate(ps):
        full = embed_operator(p, state.layout, acts_on)
        if state.is_pure:
            w = full @ state.vector
            prob = float(np.real(np.vdot(w, w)))
            post = QuantumState(state.layout, vector=w / np.sqrt(prob)) if prob >= ZERO_PROBABILITY else None
        else:
            r = full @ state.rho @ full
            prob = float(np.real(np.trace(r)))
            post = QuantumState(state.layout, rho=r / prob) if prob >= ZERO_PROBABILITY else None
        out.append(MeasurementOutcome(k, max(prob, 0.0), post))
    return out


def basis_state(index: int | Sequence[int], layout) -> QuantumState:
    """Computational-basis ket, either by flat index or per-subsystem digits."""
    layout = _layout(layout)
    if not isinstance(index, (int, np.integer)):
        index = int(np.ravel_multi_index(tuple(index), layout.dims))
    v = np.zeros(layout.dim, dtype=complex)
    v[index] = 1.0
    return QuantumState(layout, vector=v)
