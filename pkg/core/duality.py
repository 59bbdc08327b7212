"""
Losses, regularizers, their Fenchel conjugates and the primal / dual objectives.

Scaling convention used everywhere (objectives, oracles, gaps):

    P(w) = (1/T) sum_t loss(y_t, w.x_t) + lam * g(w)
    w(z) = grad h( X z / (lam T) )

so every dual objective below is on the same scale as its primal and
P(w) - D(z) >= 0 for any w and any feasible z.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Optional, Union

import numpy as np
from scipy.special import entr, expit

from .errors import DimensionError, DomainError, LabelError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class LossKind(Enum):
    SQUARE = "square"
    HINGE_MARGIN = "hinge_margin"
    LOGISTIC = "logistic"


class RegularizerKind(Enum):
    L2 = "l2"
    ENTROPY = "entropy"


class DualModel(Enum):
    RIDGE = "ridge"
    SVM = "svm"
    LOGISTIC = "logistic"
    EXPGRAD = "expgrad"


@dataclass(frozen=True)
class LossModel:
    kind: LossKind
    kappa: float = 1.0  # only read by HINGE_MARGIN

    def __post_init__(self):
        if self.kind is LossKind.HINGE_MARGIN and not self.kappa > 0:
            raise DomainError(f"hinge-margin loss needs kappa > 0, got {self.kappa}")

    @classmethod
    def square(cls) -> "LossModel":
        return cls(LossKind.SQUARE)

    @classmethod
    def hinge_margin(cls, kappa: float = 1.0) -> "LossModel":
        return cls(LossKind.HINGE_MARGIN, kappa)

    @classmethod
    def logistic(cls) -> "LossModel":
        return cls(LossKind.LOGISTIC)

    @property
    def is_classification(self) -> bool:
        return self.kind is not LossKind.SQUARE


@dataclass(frozen=True, eq=False)
class RegularizerModel:
    kind: RegularizerKind
    lam: float
    mu: Optional[np.ndarray] = None

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"lambda must be positive, got {self.lam}")
        if self.kind is RegularizerKind.ENTROPY:
            if self.mu is None:
                raise DomainError("entropy regularizer needs a prior mu")
            mu = np.asarray(self.mu, dtype=float).reshape(-1)
            if mu.size == 0 or not np.all(mu > 0):
                raise DomainError("every component of mu must be positive")
            object.__setattr__(self, 'mu', mu)

    @classmethod
    def l2(cls, lam: float) -> "RegularizerModel":
        return cls(RegularizerKind.L2, lam)

    @classmethod
    def entropy(cls, lam: float, mu) -> "RegularizerModel":
        return cls(RegularizerKind.ENTROPY, lam, mu)


@dataclass
class PrimalDualPoint:
    """Weights w (synapses, length n) paired with dual activities z (length T)."""
    w: np.ndarray
    z: np.ndarray

    def check(self, X: np.ndarray) -> None:
        n, T = _matrix_shape(X)
        if np.shape(self.w) != (n,):
            raise DimensionError(f"w has shape {np.shape(self.w)}, expected ({n},)")
        if np.shape(self.z) != (T,):
            raise DimensionError(f"z has shape {np.shape(self.z)}, expected ({T},)")


@dataclass(frozen=True, eq=False)
class DualParams:
    lam: float = 1.0
    kappa: float = 1.0
    mu: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"lambda must be positive, got {self.lam}")
        if not self.kappa > 0:
            raise DomainError(f"kappa must be positive, got {self.kappa}")


class BarrierValue(NamedTuple):
    value: float
    derivative: float

    @property
    def at_boundary(self) -> bool:
        return not np.isfinite(self.derivative)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _out(value):
    return float(value) if np.ndim(value) == 0 else value


def _matrix_shape(X: np.ndarray):
    if np.ndim(X) != 2:
        raise DimensionError(f"X must be an n x T matrix, got ndim={np.ndim(X)}")
    return X.shape


def _check_labels(loss: LossModel, y) -> None:
    if loss.is_classification:
        y = np.asarray(y)
        if not np.all((y == 1) | (y == -1)):
            raise LabelError(f"{loss.kind.value} loss needs labels in {{-1, +1}}")


def check_binary_labels(y) -> None:
    y = np.atleast_1d(np.asarray(y))
    bad = np.flatnonzero(~((y == 1) | (y == -1)))
    if bad.size:
        raise LabelError(f"label {y[bad[0]]!r} at index {bad[0]} is not in {{-1, +1}}")


def sigmoid(u: ArrayLike) -> ArrayLike:
    return _out(expit(u))


# ---------------------------------------------------------------------------
# losses
# ---------------------------------------------------------------------------

def loss_value(loss: LossModel, y: ArrayLike, u: ArrayLike) -> ArrayLike:
    """Loss of prediction u against label y (elementwise for arrays)."""
    _check_labels(loss, y)
    y = np.asarray(y, dtype=float)
    u = np.asarray(u, dtype=float)
    if loss.kind is LossKind.SQUARE:
        return _out(0.5 * (y - u) ** 2)
    if loss.kind is LossKind.HINGE_MARGIN:
        return _out(np.maximum(0.0, 1.0 - y * u))
    # log(1 + exp(-yu)) without overflow for large |yu|
    return _out(np.logaddexp(0.0, -y * u))


def loss_subgradient(loss: LossModel, y: ArrayLike, u: ArrayLike) -> ArrayLike:
    """(Sub)gradient of the loss in its prediction argument; 0 at the hinge kink."""
    _check_labels(loss, y)
    y = np.asarray(y, dtype=float)
    u = np.asarray(u, dtype=float)
    if loss.kind is LossKind.SQUARE:
        return _out(u - y)
    if loss.kind is LossKind.HINGE_MARGIN:
        return _out(np.where(y * u < 1.0, -y, 0.0))
    return _out(-y * expit(-y * u))


def dual_optimal_z(loss: LossModel, y: ArrayLike, u: ArrayLike) -> ArrayLike:
    """Dual activity at the optimum, z = -loss'(y, u). For the square loss: the prediction error."""
    return _out(-np.asarray(loss_subgradient(loss, y, u)))


def margin_penalty(kappa: float, y: ArrayLike, u: ArrayLike) -> ArrayLike:
    """Squared-hinge penalty [1 - yu]_+^2 / (2 kappa), the primal paired with the kappa-dual."""
    if not kappa > 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    check_binary_labels(y)
    slack = np.maximum(0.0, 1.0 - np.asarray(y, dtype=float) * np.asarray(u, dtype=float))
    return _out(slack ** 2 / (2.0 * kappa))


def square_conjugate(y: float, v: float) -> float:
    """c(y, v) = sup_u (uv - (y - u)^2 / 2) = y v + v^2 / 2."""
    return float(y * v + 0.5 * v * v)


def entropy_barrier(z: float) -> BarrierValue:
    """F(z) = -z log z - (1-z) log(1-z) and F'(z) = log((1-z)/z)."""
    z = float(z)
    if not 0.0 <= z <= 1.0:
        raise DomainError(f"entropy barrier is defined on [0, 1], got {z}")
    value = float(entr(z) + entr(1.0 - z))
    with np.errstate(divide='ignore'):
        derivative = float(np.log1p(-z) - np.log(z))
    return BarrierValue(value, derivative)


def _barrier_values(z: np.ndarray) -> np.ndarray:
    return entr(z) + entr(1.0 - z)


def _barrier_derivatives(z: np.ndarray) -> np.ndarray:
    with np.errstate(divide='ignore'):
        return np.log1p(-z) - np.log(z)


# ---------------------------------------------------------------------------
# regularizers
# ---------------------------------------------------------------------------

def _check_reg_dim(reg: RegularizerModel, v: np.ndarray) -> None:
    if v.ndim != 1:
        raise DimensionError(f"expected a vector, got shape {v.shape}")
    if reg.kind is RegularizerKind.ENTROPY and v.shape != reg.mu.shape:
        raise DimensionError(f"vector has length {v.size}, prior mu has length {reg.mu.size}")


def reg_value(reg: RegularizerModel, w) -> float:
    """g(w): 1/2 ||w||^2, or sum_k w_k ln(w_k / mu_k) with 0 ln 0 = 0."""
    w = np.asarray(w, dtype=float)
    _check_reg_dim(reg, w)
    if reg.kind is RegularizerKind.L2:
        return float(0.5 * w @ w)
    negative = np.flatnonzero(w < 0)
    if negative.size:
        raise DomainError(f"entropy regularizer needs w >= 0; w[{negative[0]}] = {w[negative[0]]}",
                          index=int(negative[0]))
    # -entr(w) = w ln w, so w ln(w/mu) = -entr(w) - w ln mu
    return float(np.sum(-entr(w) - w * np.log(reg.mu)))


def reg_conjugate(reg: RegularizerModel, v) -> float:
    """h(v) = sup_u (u.v - g(u))."""
    v = np.asarray(v, dtype=float)
    _check_reg_dim(reg, v)
    if reg.kind is RegularizerKind.L2:
        return float(0.5 * v @ v)
    return float(np.sum(reg.mu * np.exp(v - 1.0)))


def reg_conjugate_gradient(reg: RegularizerModel, v) -> np.ndarray:
    """grad h(v): identity for L2, mu * exp(v - 1) for the unnormalized entropy."""
    v = np.asarray(v, dtype=float)
    _check_reg_dim(reg, v)
    if reg.kind is RegularizerKind.L2:
        return v.copy()
    return reg.mu * np.exp(v - 1.0)


def weights_from_duals(reg: RegularizerModel, z, X: np.ndarray, lam: Optional[float] = None) -> np.ndarray:
    """w = grad h( X z / (lam T) ): the synapses as a weighted sum of samples."""
    n, T = _matrix_shape(X)
    z = np.asarray(z, dtype=float)
    if z.shape != (T,):
        raise DimensionError(f"z has shape {z.shape}, expected ({T},)")
    lam = reg.lam if lam is None else lam
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    return reg_conjugate_gradient(reg, X @ z / (lam * T))


# ---------------------------------------------------------------------------
# objectives
# ---------------------------------------------------------------------------

def primal_objective(loss: LossModel, reg: RegularizerModel, w, X: np.ndarray, y) -> float:
    n, T = _matrix_shape(X)
    w = np.asarray(w, dtype=float)
    y = np.asarray(y, dtype=float)
    if w.shape != (n,) or y.shape != (T,) or T == 0:
        raise DimensionError(f"w {w.shape}, y {y.shape} do not match X {X.shape}")
    u = X.T @ w
    return float(np.mean(loss_value(loss, y, u)) + reg.lam * reg_value(reg, w))


def _regularizer_for(model: DualModel, params: DualParams) -> RegularizerModel:
    if model is DualModel.EXPGRAD:
        return RegularizerModel.entropy(params.lam, params.mu)
    return RegularizerModel.l2(params.lam)


def model_primal_objective(model: DualModel, w, X: np.ndarray, y, params: DualParams) -> float:
    """Primal objective whose exact dual is dual_objective(model, ...)."""
    if model is DualModel.RIDGE:
        return primal_objective(LossModel.square(), _regularizer_for(model, params), w, X, y)
    if model is DualModel.LOGISTIC:
        return primal_objective(LossModel.logistic(), _regularizer_for(model, params), w, X, y)
    if model is DualModel.EXPGRAD:
        return primal_objective(LossModel.square(), _regularizer_for(model, params), w, X, y)
    n, T = _matrix_shape(X)
    w = np.asarray(w, dtype=float)
    if w.shape != (n,):
        raise DimensionError(f"w has shape {w.shape}, expected ({n},)")
    penalty = margin_penalty(params.kappa, y, X.T @ w)
    return float(np.mean(penalty) + params.lam * 0.5 * w @ w)


def _dual_inputs(model: DualModel, z, X, y):
    n, T = _matrix_shape(X)
    z = np.asarray(z, dtype=float)
    y = np.asarray(y, dtype=float)
    if z.shape != (T,) or y.shape != (T,):
        raise DimensionError(f"z {z.shape} and y {y.shape} must both have length T={T}")
    if model in (DualModel.SVM, DualModel.LOGISTIC):
        check_binary_labels(y)
    if model is DualModel.SVM:
        bad = np.flatnonzero(z < 0)
        if bad.size:
            raise DomainError(f"svm dual needs z >= 0; z[{bad[0]}] = {z[bad[0]]}", index=int(bad[0]))
    if model is DualModel.LOGISTIC:
        bad = np.flatnonzero((z < 0) | (z > 1))
        if bad.size:
            raise DomainError(f"logistic dual needs z in [0, 1]; z[{bad[0]}] = {z[bad[0]]}",
                              index=int(bad[0]))
    return z, y, T


def _feature_map(model: DualModel, X, y):
    # chi_t = y_t x_t for the classification duals
    if model in (DualModel.SVM, DualModel.LOGISTIC):
        return X * y[np.newaxis, :]
    return X


def dual_weights(model: DualModel, z, X: np.ndarray, y, params: DualParams) -> np.ndarray:
    """Weights induced by dual activities z under the model's regularizer."""
    z, y, T = _dual_inputs(model, z, X, y)
    return weights_from_duals(_regularizer_for(model, params), z, _feature_map(model, X, y))


def dual_objective(model: DualModel, z, X: np.ndarray, y, params: DualParams = DualParams()) -> float:
    z, y, T = _dual_inputs(model, z, X, y)
    lam = params.lam
    if model is DualModel.EXPGRAD:
        reg = _regularizer_for(model, params)
        return float((z @ y - 0.5 * z @ z) / T - lam * reg_conjugate(reg, X @ z / (lam * T)))

    v = _feature_map(model, X, y) @ z
    kernel_term = (v @ v) / (2.0 * lam * T)
    if model is DualModel.RIDGE:
        return float((z @ y - 0.5 * z @ z - kernel_term) / T)
    if model is DualModel.SVM:
        return float((z.sum() - 0.5 * params.kappa * z @ z - kernel_term) / T)
    return float((_barrier_values(z).sum() - kernel_term) / T)


def dual_gradient(model: DualModel, z, X: np.ndarray, y, params: DualParams = DualParams()) -> np.ndarray:
    z, y, T = _dual_inputs(model, z, X, y)
    chi = _feature_map(model, X, y)
    w = weights_from_duals(_regularizer_for(model, params), z, chi)
    predicted = chi.T @ w
    if model in (DualModel.RIDGE, DualModel.EXPGRAD):
        return (y - z - predicted) / T
    if model is DualModel.SVM:
        return (1.0 - params.kappa * z - predicted) / T
    return (_barrier_derivatives(z) - predicted) / T


def similarity_matching_objective(X: np.ndarray, Z: np.ndarray) -> float:
    """(-2 Tr(X'X Z'Z) + ||Z'Z||_F^2) / T^2, evaluated without forming T x T Gram matrices."""
    n, T = _matrix_shape(X)
    m, T_z = _matrix_shape(Z)
    if T_z != T:
        raise DimensionError(f"Z has {T_z} samples, X has {T}")
    cross = np.linalg.norm(X @ Z.T) ** 2
    output = np.linalg.norm(Z @ Z.T) ** 2
    return float((-2.0 * cross + output) / T ** 2)
