"""Dense complex linear algebra over labelled tensor-product layouts.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. A
:class:`SubsystemLayout` records how the row/column index of such a matrix
factorises into subsystems, with the leftmost label as the most significant
digit of the computational-basis index.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateLabel,
    NotHermitian,
    NotSquare,
    NotUnitary,
    UnknownLabel,
)

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered subsystem labels and their local dimensions."""

    dims: tuple[int, ...]
    labels: tuple[str, ...]

    def __init__(self, dims: Sequence[int], labels: Sequence | None = None):
        dims = tuple(int(d) for d in dims)
        if labels is None:
            labels = [str(i + 1) for i in range(len(dims))]
        labels = tuple(str(lab) for lab in labels)
        if len(dims) != len(labels):
            raise DimensionMismatch(f"{len(dims)} dims but {len(labels)} labels")
        if not dims:
            raise DimensionMismatch("layout needs at least one subsystem")
        if any(d < 2 for d in dims):
            raise DimensionMismatch(f"subsystem dimensions must be >= 2, got {dims}")
        if len(set(labels)) != len(labels):
            raise DuplicateLabel(f"labels must be unique, got {labels}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def qubits(cls, n: int, labels: Sequence | None = None) -> "SubsystemLayout":
        return cls([2] * n, labels)

    @property
    def dim(self) -> int:
        return prod(self.dims)

    def __len__(self) -> int:
        return len(self.dims)

    def index(self, label) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise UnknownLabel(f"unknown subsystem label {label!r}; layout has {self.labels}") from None

    def positions(self, labels: Iterable) -> list[int]:
        """Layout positions of ``labels``, in the order given."""
        pos = [self.index(lab) for lab in labels]
        if len(set(pos)) != len(pos):
            raise DuplicateLabel(f"repeated label in {list(labels)}")
        return pos

    def canonical(self, labels: Iterable) -> tuple[str, ...]:
        """``labels`` sorted into layout order."""
        return tuple(self.labels[p] for p in sorted(self.positions(labels)))

    def sub(self, labels: Iterable) -> "SubsystemLayout":
        """Layout restricted to ``labels`` (kept in layout order)."""
        pos = sorted(self.positions(labels))
        return SubsystemLayout([self.dims[p] for p in pos], [self.labels[p] for p in pos])

    def subdim(self, labels: Iterable) -> int:
        return prod(self.dims[p] for p in self.positions(labels))

    def concat(self, other: "SubsystemLayout") -> "SubsystemLayout":
        return SubsystemLayout(self.dims + other.dims, self.labels + other.labels)


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def kron(a, b) -> np.ndarray:
    """Kronecker product ``a ⊗ b``."""
    return np.kron(as_matrix(a), as_matrix(b))


def dagger(m) -> np.ndarray:
    return as_matrix(m).conj().T


def hermiticity_error(m) -> float:
    m = as_matrix(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def unitarity_error(u) -> float:
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        raise NotSquare(f"matrix is {u.shape[0]}x{u.shape[1]}")
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def check_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise NotSquare(f"matrix is {m.shape[0]}x{m.shape[1]}")
    err = hermiticity_error(m)
    if err > tol:
        raise NotHermitian(f"max|M - M^dagger| = {err:.3e} exceeds {tol:.0e}")
    return m


def check_unitary(u, tol: float = UNITARY_TOL) -> np.ndarray:
    u = as_matrix(u)
    err = unitarity_error(u)
    if err > tol:
        raise NotUnitary(f"max|U^dagger U - I| = {err:.3e} exceeds {tol:.0e}")
    return u


def hermitian_eigenvalues(m) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix in ascending order.

    Raises :class:`NotSquare` for rectangular input and :class:`NotHermitian`
    when ``max|M - M†|`` exceeds ``1e-12``.
    """
    m = check_hermitian(m)
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))


def hermitian_eigh(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors as columns."""
    m = check_hermitian(m)
    return np.linalg.eigh(0.5 * (m + m.conj().T))


def _check_layout(m: np.ndarray, layout: SubsystemLayout) -> None:
    if m.shape[0] != m.shape[1]:
        raise NotSquare(f"matrix is {m.shape[0]}x{m.shape[1]}")
    if m.shape[0] != layout.dim:
        raise DimensionMismatch(f"matrix dimension {m.shape[0]} != layout dimension {layout.dim}")


def partial_trace(m, layout: SubsystemLayout, keep: Iterable) -> np.ndarray:
    """Reduce ``m`` onto the subsystems in ``keep``.

    The kept subsystems appear in their layout order whatever order ``keep``
    lists them in.
    """
    m = as_matrix(m)
    _check_layout(m, layout)
    keep_pos = sorted(layout.positions(keep))
    if not keep_pos:
        raise UnknownLabel("keep must name at least one subsystem")
    n = len(layout)
    drop_pos = [p for p in range(n) if p not in keep_pos]
    dk = prod(layout.dims[p] for p in keep_pos)
    dd = prod(layout.dims[p] for p in drop_pos)
    t = m.reshape(layout.dims + layout.dims)
    perm = keep_pos + drop_pos + [n + p for p in keep_pos] + [n + p for p in drop_pos]
    t = t.transpose(perm).reshape(dk, dd, dk, dd)
    return np.trace(t, axis1=1, axis2=3)


def _digits(layout: SubsystemLayout) -> np.ndarray:
    """Row ``i`` holds the per-subsystem basis digits of flat index ``i``."""
    return np.array(np.unravel_index(np.arange(layout.dim), layout.dims)).T


def embed_unitary(u, layout: SubsystemLayout, acts_on: Sequence) -> np.ndarray:
    """Full-space matrix acting as ``u`` on ``acts_on`` and identity elsewhere.

    ``u`` is indexed by the subsystems of ``acts_on`` in the order listed
    there, which need not be contiguous nor match the layout order.
    """
    u = check_unitary(u)
    return embed_operator(u, layout, acts_on)


def embed_operator(op, layout: SubsystemLayout, acts_on: Sequence) -> np.ndarray:
    """Like :func:`embed_unitary` without the unitarity check."""
    op = as_matrix(op)
    pos = layout.positions(acts_on)
    if not pos:
        raise UnknownLabel("acts_on must name at least one subsystem")
    sub_dims = [layout.dims[p] for p in pos]
    d_sub = prod(sub_dims)
    if op.shape != (d_sub, d_sub):
        raise DimensionMismatch(f"operator shape {op.shape} does not match acts_on dimension {d_sub}")
    rest = [p for p in range(len(layout)) if p not in pos]
    digits = _digits(layout)
    sub_idx = np.ravel_multi_index(tuple(digits[:, pos].T), sub_dims)
    if rest:
        rest_idx = np.ravel_multi_index(tuple(digits[:, rest].T), [layout.dims[p] for p in rest])
    else:
        rest_idx = np.zeros(layout.dim, dtype=int)
    same_rest = rest_idx[:, None] == rest_idx[None, :]
    return np.where(same_rest, op[sub_idx[:, None], sub_idx[None, :]], 0.0)
