"""
Batch oracles used to certify the online learners.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from config import Config
from core.duality import (
    DualModel,
    DualParams,
    dual_objective,
    dual_weights,
    model_primal_objective,
)
from core.errors import DimensionError, DomainError, NumericalError, StepSizeError
from .linalg import symmetric_eig

logger = logging.getLogger(__name__)

BATCH_DUAL_MODELS = (DualModel.RIDGE, DualModel.SVM, DualModel.LOGISTIC)


@dataclass
class DualSolveResult:
    z: np.ndarray
    objective: float
    iters: int
    kkt_residual: float
    converged: bool = True

    def weights(self, model: DualModel, X: np.ndarray, y, params: DualParams) -> np.ndarray:
        return dual_weights(model, self.z, X, y, params)


def _data(X, y):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[1],) or X.shape[1] == 0:
        raise DimensionError(f"X {X.shape} and y {y.shape} are inconsistent")
    return X, y


def ridge_closed_form(X, y, lam: float) -> np.ndarray:
    """Solve ((1/T) X X^T + lam I) w = (1/T) X y."""
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    X, y = _data(X, y)
    n, T = X.shape
    try:
        return np.linalg.solve(X @ X.T / T + lam * np.eye(n), X @ y / T)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"ridge normal equations are singular: {e}") from e


def duality_gap(model: DualModel, X, y, w, z, params: DualParams = DualParams()) -> float:
    """P(w) - D(z); nonnegative for every w and every feasible z."""
    X, y = _data(X, y)
    return model_primal_objective(model, w, X, y, params) - dual_objective(model, z, X, y, params)


def _ascent_direction(model: DualModel, z, X, y, chi, params: DualParams) -> np.ndarray:
    """T * grad D(z), one entry per sample."""
    w = dual_weights(model, z, X, y, params)
    predicted = chi.T @ w
    if model is DualModel.RIDGE:
        return y - z - predicted
    if model is DualModel.SVM:
        return 1.0 - params.kappa * z - predicted
    return np.log1p(-z) - np.log(z) - predicted


def batch_dual_solve(
    model: DualModel,
    X,
    y,
    params: DualParams = DualParams(),
    iters: int = Config.DUAL_ASCENT_MAX_ITERS,
    step: Optional[float] = None,
    tol: float = Config.DUAL_ASCENT_TOL,
    eps: float = Config.LOGISTIC_EPS,
) -> DualSolveResult:
    """
    Projected gradient ascent on the model's dual objective.

    Projection: none (ridge), z >= 0 (svm), z in [eps, 1 - eps] (logistic).
    The default step is the inverse curvature bound 1 / (lam_max(K)/(lam T) + c);
    logistic adds the barrier curvature 1/(z(1-z)) per coordinate.
    """
    if model not in BATCH_DUAL_MODELS:
        raise DomainError(f"batch dual ascent supports ridge, svm and logistic, not {model.value}")
    if int(iters) < 1:
        raise DomainError(f"iters must be >= 1, got {iters}")
    X, y = _data(X, y)
    n, T = X.shape
    chi = X * y[np.newaxis, :] if model is not DualModel.RIDGE else X

    kernel_curvature = max(float(symmetric_eig(chi @ chi.T).values[0]), 0.0) / (params.lam * T)
    if model is DualModel.RIDGE:
        project = lambda v: v
        z = np.zeros(T)
        fixed_step = 1.0 / (kernel_curvature + 1.0)
    elif model is DualModel.SVM:
        project = lambda v: np.maximum(v, 0.0)
        z = np.zeros(T)
        fixed_step = 1.0 / (kernel_curvature + params.kappa)
    else:
        project = lambda v: np.clip(v, eps, 1.0 - eps)
        z = np.full(T, 0.5)
        fixed_step = None
    if step is not None:
        if not step > 0:
            raise DomainError(f"step must be positive, got {step}")
        fixed_step = step

    objective = dual_objective(model, z, X, y, params)
    decreasing = 0
    residual = np.inf

    for it in range(int(iters) + 1):
        direction = _ascent_direction(model, z, X, y, chi, params)
        if fixed_step is None:
            s = 1.0 / (kernel_curvature + 1.0 / (z * (1.0 - z)))
        else:
            s = fixed_step
        nxt = project(z + s * direction)
        residual = float(np.max(np.abs((nxt - z) / s)))
        if not np.isfinite(residual):
            raise NumericalError(f"dual ascent produced non-finite values at iteration {it}")
        if residual <= tol or it == iters:
            break

        z = nxt
        new_objective = dual_objective(model, z, X, y, params)
        slack = 1e-14 * max(1.0, abs(objective))
        decreasing = decreasing + 1 if new_objective < objective - slack else 0
        if decreasing >= Config.DIVERGENCE_PATIENCE:
            raise StepSizeError(
                f"dual objective decreased for {decreasing} consecutive iterations; step is too large"
            )
        objective = new_objective

    converged = residual <= tol
    if not converged:
        logger.warning(f"{model.value} dual ascent stopped at {iters} iterations, KKT residual {residual:.3e}")
    else:
        logger.debug(f"{model.value} dual ascent converged in {it} iterations")
    return DualSolveResult(z=z, objective=objective, iters=it, kkt_residual=residual, converged=converged)


def finite_diff_check(
    f: Callable,
    g: Callable,
    points: Iterable,
    step: float = Config.FINITE_DIFF_STEP,
) -> float:
    """
    Max relative error of g against central differences of f over points.

    Scalar points compare derivatives; vector points compare full gradients,
    relative to max(1, |g|).
    """
    worst = 0.0
    for point in points:
        p = np.asarray(point, dtype=float)
        analytic = np.asarray(g(float(p) if p.ndim == 0 else p), dtype=float)
        if p.ndim == 0:
            numeric = (f(float(p) + step) - f(float(p) - step)) / (2.0 * step)
        else:
            numeric = np.empty(p.shape)
            for k in range(p.size):
                e = np.zeros(p.shape)
                e.flat[k] = step
                numeric.flat[k] = (f(p + e) - f(p - e)) / (2.0 * step)
        error = float(np.linalg.norm(np.ravel(numeric - analytic)))
        scale = max(1.0, float(np.linalg.norm(np.ravel(analytic))))
        worst = max(worst, error / scale)
    return worst
