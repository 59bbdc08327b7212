"""
Neural dynamics: explicit-Euler relaxation of dz/dgamma = Gamma(z) to a fixed
point, and the vector fields of each model.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Union

import numpy as np
from scipy.special import expit, logit

from config import Config
from .errors import ConvergenceError, DimensionError, DomainError, NumericalError, StabilityError, StepSizeError
from .numeric import symmetric_eig

logger = logging.getLogger(__name__)

Activity = Union[float, np.ndarray]


class FixedPointMode(Enum):
    RELAX = "relax"
    SOLVE = "solve"


@dataclass(frozen=True)
class DynamicsConfig:
    step: float = Config.DYNAMICS_STEP
    tol: float = Config.DYNAMICS_TOL
    max_iters: int = Config.DYNAMICS_MAX_ITERS

    def __post_init__(self):
        if not self.step > 0:
            raise DomainError(f"Euler step must be positive, got {self.step}")
        if not self.tol > 0:
            raise DomainError(f"tolerance must be positive, got {self.tol}")
        if int(self.max_iters) < 1:
            raise DomainError(f"max_iters must be >= 1, got {self.max_iters}")


@dataclass
class FixedPoint:
    z: Activity
    iters: int
    residual: float


def relax(
    field: Callable[[Activity], Activity],
    z0: Activity,
    cfg: DynamicsConfig = DynamicsConfig(),
    project: Optional[Callable[[Activity], Activity]] = None,
) -> FixedPoint:
    """
    Iterate z <- z + step * Gamma(z) until the sup-norm residual drops below tol.

    With a projection the update is z <- P(z + step * Gamma(z)) and the
    residual is the projected one, |P(z + step * Gamma) - z| / step, so a state
    held at a constraint by an outward-pointing field counts as converged.
    """
    scalar = np.ndim(z0) == 0
    z = float(z0) if scalar else np.array(z0, dtype=float)
    h = cfg.step

    for it in range(cfg.max_iters + 1):
        g = field(z)
        if scalar:
            g = float(g)
            if not math.isfinite(g):
                raise NumericalError(f"vector field returned {g} at z={z}")
        else:
            g = np.asarray(g, dtype=float)
            if not np.all(np.isfinite(g)):
                raise NumericalError("vector field returned non-finite values")

        nxt = z + h * g
        if project is not None:
            nxt = project(nxt)
            g = (nxt - z) / h

        residual = abs(g) if scalar else (float(np.max(np.abs(g))) if g.size else 0.0)
        if residual <= cfg.tol:
            return FixedPoint(z=z, iters=it, residual=residual)
        if it == cfg.max_iters:
            break
        z = nxt

    raise ConvergenceError("neural dynamics did not settle", residual=residual, iters=cfg.max_iters)


# ---------------------------------------------------------------------------
# vector fields
# ---------------------------------------------------------------------------

def _drive(w, x) -> float:
    w = np.asarray(w, dtype=float)
    x = np.asarray(x, dtype=float)
    if w.shape != x.shape or w.ndim != 1:
        raise DimensionError(f"w {w.shape} and x {x.shape} must be vectors of equal length")
    return float(w @ x)


def ridge_field(w, x, y: float, z: float) -> float:
    """(y - w.x) - z: leaky integration of the prediction error."""
    return (y - _drive(w, x)) - z


def logistic_field(w, x, y: float, z: float) -> float:
    """y w.x - F'(z), with F the binary entropy barrier."""
    if not 0.0 < z < 1.0:
        raise DomainError(f"logistic activity must lie strictly inside (0, 1), got {z}")
    return y * _drive(w, x) - (math.log1p(-z) - math.log(z))


def svm_activation(w, x, y: float, kappa: float) -> float:
    """Rectified margin violation [1 - y w.x]_+ / kappa."""
    if not kappa > 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    return max(0.0, 1.0 - y * _drive(w, x)) / kappa


def lateral_spectrum(M: np.ndarray) -> np.ndarray:
    """Eigenvalues of the lateral matrix, descending; M must be symmetric."""
    if not np.allclose(M, M.T, atol=Config.SYMMETRY_TOL, rtol=0.0):
        raise StabilityError("lateral matrix M is not symmetric", float('nan'))
    return symmetric_eig(M).values


def check_lateral_stability(M: np.ndarray, eps: float = Config.PD_EPS) -> float:
    """Return the smallest eigenvalue of M; raise if M is not symmetric positive definite."""
    smallest = float(lateral_spectrum(M)[-1])
    if smallest < eps:
        raise StabilityError("lateral matrix M is not positive definite", smallest)
    return smallest


def check_relaxation_step(M: np.ndarray, step: float) -> float:
    """
    Euler iteration z <- z + h (W x - M z) contracts only while h * lambda_max(M) < 2.

    Returns lambda_max(M); raises StepSizeError when the step is too large.
    """
    largest = float(lateral_spectrum(M)[0])
    if step * largest >= 2.0:
        raise StepSizeError(
            f"Euler step {step:g} is unstable for lateral eigenvalue {largest:.4g}; "
            f"need step < {2.0 / largest:.4g} (or settle with the direct solve)"
        )
    return largest


def _check_sm_shapes(W, M, x):
    m, n = W.shape
    if M.shape != (m, m) or x.shape != (n,):
        raise DimensionError(f"W {W.shape}, M {M.shape}, x {x.shape} are inconsistent")


def sm_field(W: np.ndarray, M: np.ndarray, x: np.ndarray, z: np.ndarray, check_stability: bool = True
             ) -> np.ndarray:
    """W x - M z: feedforward drive minus lateral inhibition."""
    W, M, x, z = (np.asarray(a, dtype=float) for a in (W, M, x, z))
    _check_sm_shapes(W, M, x)
    if check_stability:
        check_lateral_stability(M)
    return W @ x - M @ z


# ---------------------------------------------------------------------------
# per-model relaxations
# ---------------------------------------------------------------------------

def relax_ridge(w, x, y: float, cfg: DynamicsConfig = DynamicsConfig()) -> FixedPoint:
    drive = ridge_field(w, x, y, 0.0)
    return relax(lambda z: drive - z, 0.0, cfg)


def relax_logistic(
    w, x, y: float,
    cfg: DynamicsConfig = DynamicsConfig(),
    eps: float = Config.LOGISTIC_EPS,
) -> FixedPoint:
    """
    Logistic neuron settled through its potential a, with rate z = sigmoid(a).

    F'(sigmoid(a)) = -a, so da/dgamma = -a - y w.x is exactly -Gamma(sigmoid(a)):
    same fixed point z = sigmoid(-y w.x), but attracting. The potential is
    clamped so that z stays in [eps, 1 - eps].
    """
    margin = y * _drive(w, x)
    lo, hi = float(logit(eps)), float(logit(1.0 - eps))
    settled = relax(lambda a: -a - margin, 0.0, cfg, project=lambda a: min(max(a, lo), hi))
    return FixedPoint(z=float(expit(settled.z)), iters=settled.iters, residual=settled.residual)


def svm_relax(w, x, y: float, kappa: float, cfg: DynamicsConfig = DynamicsConfig()) -> FixedPoint:
    """Relaxation mode for the rectified unit; matches svm_activation at the fixed point."""
    if not kappa > 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    target = (1.0 - y * _drive(w, x)) / kappa
    return relax(lambda z: target - z, 0.0, cfg, project=lambda z: max(z, 0.0))


def relax_similarity(
    W: np.ndarray,
    M: np.ndarray,
    x: np.ndarray,
    cfg: DynamicsConfig = DynamicsConfig(),
    mode: FixedPointMode = FixedPointMode.RELAX,
    check_stability: bool = True,
) -> FixedPoint:
    """
    Output activity of the lateral-inhibition network, M z = W x.

    RELAX mode integrates the field with Euler steps and refuses a step at or above
    2 / lambda_max(M); SOLVE mode settles with a direct linear solve.
    """
    W, M, x = (np.asarray(a, dtype=float) for a in (W, M, x))
    _check_sm_shapes(W, M, x)
    if check_stability:
        check_lateral_stability(M)
    if mode is FixedPointMode.SOLVE:
        drive = W @ x
        try:
            z = np.linalg.solve(M, drive)
        except np.linalg.LinAlgError as e:
            raise NumericalError(f"lateral system is singular: {e}") from e
        residual = float(np.max(np.abs(drive - M @ z))) if z.size else 0.0
        return FixedPoint(z=z, iters=0, residual=residual)

    check_relaxation_step(M, cfg.step)
    return relax(lambda z: sm_field(W, M, x, z, check_stability=False), np.zeros(M.shape[0]), cfg)
