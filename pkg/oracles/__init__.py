"""
Batch oracles: closed-form ridge, projected dual ascent, eigensolver and subspace metrics
"""

from .linalg import (
    EigResult,
    PCAResult,
    check_orthonormal,
    column_space_basis,
    min_eigenvalue,
    orthonormal_basis,
    pca_subspace,
    sample_covariance,
    span_residual,
    subspace_error,
    symmetric_eig,
)
from .batch import (
    DualSolveResult,
    batch_dual_solve,
    duality_gap,
    finite_diff_check,
    ridge_closed_form,
)

__all__ = [
    'EigResult',
    'PCAResult',
    'check_orthonormal',
    'column_space_basis',
    'min_eigenvalue',
    'orthonormal_basis',
    'pca_subspace',
    'sample_covariance',
    'span_residual',
    'subspace_error',
    'symmetric_eig',
    'DualSolveResult',
    'batch_dual_solve',
    'duality_gap',
    'finite_diff_check',
    'ridge_closed_form',
]
