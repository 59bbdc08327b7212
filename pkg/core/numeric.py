"""
Numerical primitives shared by every layer: seeded generators and a dense
symmetric eigensolver (cyclic Jacobi).
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from config import Config
from .errors import ConvergenceError, DimensionError, DomainError, NumericalError

logger = logging.getLogger(__name__)


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator; the only source of randomness in the toolkit."""
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass
class EigResult:
    values: np.ndarray   # descending
    vectors: np.ndarray  # orthonormal columns, vectors[:, i] pairs with values[i]
    sweeps: int = 0


def _square(A) -> np.ndarray:
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NumericalError("matrix contains NaN or Inf")
    return A


def _off_diagonal_norm(A: np.ndarray) -> float:
    return float(np.sqrt(max(np.sum(A * A) - np.sum(np.diag(A) ** 2), 0.0)))


def _canonical_signs(V: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry is positive."""
    if V.size == 0:
        return V
    pivots = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[pivots, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def symmetric_eig(
    A,
    tol: float = Config.JACOBI_TOL,
    max_sweeps: int = Config.JACOBI_MAX_SWEEPS,
    symmetry_tol: float = Config.SYMMETRY_TOL,
) -> EigResult:
    """
    Cyclic Jacobi eigen-decomposition of a real symmetric matrix.

    Sweeps rotate every (p, q) pair in row order until the off-diagonal
    Frobenius mass drops below tol * max(1, ||A||_F).
    """
    A = _square(A)
    m = A.shape[0]
    if np.max(np.abs(A - A.T), initial=0.0) > symmetry_tol:
        raise DomainError("matrix is not symmetric within tolerance")
    A = 0.5 * (A + A.T)
    V = np.eye(m)

    threshold = tol * max(1.0, float(np.linalg.norm(A)))
    sweeps = 0
    while _off_diagonal_norm(A) >= threshold:
        if sweeps == max_sweeps:
            raise ConvergenceError("Jacobi sweeps exhausted", residual=_off_diagonal_norm(A), iters=sweeps)
        sweeps += 1
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p, col_q = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p, row_q = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, q] = A[q, p] = 0.0

                vec_p, vec_q = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vec_p - s * vec_q
                V[:, q] = s * vec_p + c * vec_q

    values = np.diag(A).copy()
    order = np.argsort(-values, kind='stable')
    logger.debug(f"Jacobi converged: m={m}, sweeps={sweeps}")
    return EigResult(values=values[order], vectors=_canonical_signs(V[:, order]), sweeps=sweeps)


def min_eigenvalue(A) -> float:
    values = symmetric_eig(A).values
    return float(values[-1]) if values.size else math.inf

