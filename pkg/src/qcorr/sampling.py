"""Seeded random unitaries, Hamiltonians and states for property sweeps."""

from __future__ import annotations

import numpy as np

from .linalg import SubsystemLayout
from .quantum_state import QuantumState


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_unitary(dim: int, rng) -> np.ndarray:
    """Haar-distributed unitary from the QR factorisation of a complex Gaussian matrix."""
    rng = rng_from(rng)
    q, r = np.linalg.qr(_ginibre(rng, dim, dim))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(dim: int, rng, scale: float = 1.0) -> np.ndarray:
    rng = rng_from(rng)
    g = _ginibre(rng, dim, dim)
    return scale * 0.5 * (g + g.conj().T)


def random_pure_state(layout: SubsystemLayout, rng) -> QuantumState:
    rng = rng_from(rng)
    v = _ginibre(rng, layout.dim, 1).reshape(-1)
    return QuantumState(layout, vector=v / np.linalg.norm(v))


def random_mixed_state(layout: SubsystemLayout, rng, rank: int | None = None) -> QuantumState:
    """Density matrix ``G G† / Tr(G G†)`` with ``G`` a ``dim × rank`` Ginibre matrix."""
    rng = rng_from(rng)
    rank = layout.dim if rank is None else rank
    g = _ginibre(rng, layout.dim, rank)
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    return QuantumState(layout, rho=0.5 * (rho + rho.conj().T))
