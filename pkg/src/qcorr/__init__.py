"""Entropic correlation measures for small multipartite quantum systems."""

from .entropy import (
    CorrelationReport,
    check_mi_bound,
    check_ssa,
    correlation_report,
    entropy_of_entanglement,
    index_of_correlation,
    subset_entropy,
    von_neumann_entropy,
)
from .linalg import SubsystemLayout, embed_unitary, hermitian_eigenvalues, kron, partial_trace
from .partition import Partition, decompose, invariant_entropies, verify_invariance
from .quantum_state import (
    QuantumState,
    apply_unitary,
    density,
    mixed_state,
    product,
    projective_measure,
    pure_state,
)

__version__ = "0.1.0"
