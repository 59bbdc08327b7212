"""
PCA reference subspaces and the subspace metrics built on the Jacobi eigensolver.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from config import Config
from core.errors import DimensionError, DomainError, NumericalError, OrthonormalityError
from core.numeric import EigResult, min_eigenvalue, symmetric_eig

logger = logging.getLogger(__name__)


@dataclass
class PCAResult:
    basis: np.ndarray    # n x m, orthonormal columns
    values: np.ndarray   # full spectrum of the sample covariance, descending
    degenerate: bool = False

    @property
    def eigengap(self) -> float:
        m = self.basis.shape[1]
        if m == 0 or m >= self.values.size:
            return math.inf
        return float(self.values[m - 1] - self.values[m])


def sample_covariance(X) -> np.ndarray:
    """(1/T) X X^T for an n x T data matrix (no centering)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] == 0:
        raise DimensionError(f"X must be an n x T matrix with T >= 1, got shape {X.shape}")
    return X @ X.T / X.shape[1]


def pca_subspace(X, m: int) -> PCAResult:
    """Top-m eigenvectors of the sample covariance."""
    C = sample_covariance(X)
    n = C.shape[0]
    if not 0 <= m <= n:
        raise DomainError(f"subspace dimension m={m} must lie in [0, n={n}]")

    eig = symmetric_eig(C)
    result = PCAResult(basis=eig.vectors[:, :m].copy(), values=eig.values)
    if 0 < m < n and result.eigengap < Config.DEGENERACY_GAP:
        result.degenerate = True
        logger.warning(f"PCA subspace is degenerate: eigengap {result.eigengap:.3e} at m={m}")
    return result


def column_space_basis(X, rank_tol: float = Config.RANK_TOL) -> np.ndarray:
    """Orthonormal basis of span{x_t}, with rank detection relative to the top eigenvalue."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionError(f"X must be a matrix, got shape {X.shape}")
    eig = symmetric_eig(X @ X.T)
    top = float(eig.values[0]) if eig.values.size else 0.0
    if top <= 0.0:
        return np.zeros((X.shape[0], 0))
    rank = int(np.sum(eig.values > rank_tol * top))
    return eig.vectors[:, :rank]


def span_residual(w, X) -> float:
    """||w - P_X w|| / ||w||: how far w sits from the span of the samples."""
    w = np.asarray(w, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or w.shape != (X.shape[0],):
        raise DimensionError(f"w {w.shape} does not match X {X.shape}")
    B = column_space_basis(X)
    outside = w - B @ (B.T @ w)
    return float(np.linalg.norm(outside) / max(float(np.linalg.norm(w)), 1e-30))


def check_orthonormal(B, tol: float = Config.ORTHONORMALITY_TOL) -> np.ndarray:
    B = np.asarray(B, dtype=float)
    if B.ndim != 2:
        raise DimensionError(f"basis must be a matrix, got shape {B.shape}")
    deviation = np.max(np.abs(B.T @ B - np.eye(B.shape[1])), initial=0.0)
    if deviation > tol:
        raise OrthonormalityError(f"basis columns are not orthonormal (max deviation {deviation:.3e})")
    return B


def subspace_error(B1, B2) -> float:
    """||B1 B1^T - B2 B2^T||_F / sqrt(2m), in [0, 1]."""
    B1 = check_orthonormal(B1)
    B2 = check_orthonormal(B2)
    if B1.shape != B2.shape:
        raise DimensionError(f"bases have shapes {B1.shape} and {B2.shape}")
    m = B1.shape[1]
    if m == 0:
        return 0.0
    error = np.linalg.norm(B1 @ B1.T - B2 @ B2.T) / math.sqrt(2.0 * m)
    return float(min(max(error, 0.0), 1.0))


def orthonormal_basis(A, rank_tol: float = Config.RANK_TOL) -> np.ndarray:
    """Orthonormalize the columns of an n x m matrix (thin QR)."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[1] > A.shape[0]:
        raise DimensionError(f"need an n x m matrix with m <= n, got shape {A.shape}")
    Q, R = np.linalg.qr(A)
    diag = np.abs(np.diag(R))
    if diag.size and diag.min() <= rank_tol * max(diag.max(), 1e-300):
        raise NumericalError("columns are linearly dependent; no m-dimensional basis")
    return Q
