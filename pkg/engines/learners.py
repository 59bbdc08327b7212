"""
Online supervised learners: neural dynamics for the activity z, then a local
Hebbian update of the synapses w.

Every step is a pure function (state, x, y) -> (StepOutcome, state'); the
incoming state is never mutated.
"""
import dataclasses
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from config import Config
from core.duality import DualModel, DualParams, check_binary_labels
from core.dynamics import (
    DynamicsConfig,
    relax_logistic,
    relax_ridge,
    svm_activation,
    svm_relax,
)
from core.errors import DimensionError, DomainError, NumericalError, StepSizeError

logger = logging.getLogger(__name__)


class LearnerModel(Enum):
    RIDGE = "ridge"
    SVM = "svm"
    LOGISTIC = "logistic"
    EXPGRAD = "expgrad"
    SM = "sm"
    OJA = "oja"

    @property
    def supervised(self) -> bool:
        return self in (LearnerModel.RIDGE, LearnerModel.SVM, LearnerModel.LOGISTIC, LearnerModel.EXPGRAD)

    @property
    def classification(self) -> bool:
        return self in (LearnerModel.SVM, LearnerModel.LOGISTIC)

    @property
    def dual_model(self) -> Optional[DualModel]:
        return DualModel(self.value) if self.supervised else None


class ScheduleKind(Enum):
    CONSTANT = "constant"
    INVERSE_TIME = "inverse_time"


@dataclass(frozen=True)
class Schedule:
    """Learning-rate schedule eta_t = eta0 * factor(t), t the global step count."""
    kind: ScheduleKind = ScheduleKind.CONSTANT
    decay: float = 0.0

    def __post_init__(self):
        if not self.decay >= 0:
            raise DomainError(f"schedule decay must be nonnegative, got {self.decay}")

    @classmethod
    def constant(cls) -> "Schedule":
        return cls(ScheduleKind.CONSTANT)

    @classmethod
    def inverse_time(cls, decay: float) -> "Schedule":
        return cls(ScheduleKind.INVERSE_TIME, float(decay))

    def factor(self, t: int) -> float:
        if self.kind is ScheduleKind.CONSTANT:
            return 1.0
        return 1.0 / (1.0 + self.decay * t)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "decay": self.decay}


@dataclass(frozen=True, eq=False)
class Hyper:
    eta: float = 0.1
    kappa: float = 1.0         # svm margin softness
    lam: float = 1.0           # regularizer strength used by objectives and oracles
    lambda_eff: float = 0.0    # ridge weight decay in the plasticity rule
    mu: Optional[np.ndarray] = None   # expgrad prior, defaults to ones
    normalize: bool = False    # expgrad: keep total synaptic mass fixed
    relax_svm: bool = False    # svm: settle by relaxation instead of closed form

    def __post_init__(self):
        if not self.eta > 0:
            raise DomainError(f"learning rate must be positive, got {self.eta}")
        if not self.kappa > 0:
            raise DomainError(f"kappa must be positive, got {self.kappa}")
        if not self.lam > 0:
            raise DomainError(f"lambda must be positive, got {self.lam}")
        if not self.lambda_eff >= 0:
            raise DomainError(f"lambda_eff must be nonnegative, got {self.lambda_eff}")
        if self.mu is not None:
            mu = np.asarray(self.mu, dtype=float).reshape(-1)
            if not np.all(mu > 0):
                raise DomainError("every component of mu must be positive")
            object.__setattr__(self, 'mu', mu)

    def prior(self, n: int) -> np.ndarray:
        if self.mu is None:
            return np.ones(n)
        if self.mu.shape != (n,):
            raise DimensionError(f"prior mu has length {self.mu.size}, expected {n}")
        return self.mu

    def dual_params(self, n: int) -> DualParams:
        return DualParams(lam=self.lam, kappa=self.kappa, mu=self.prior(n))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eta": self.eta,
            "kappa": self.kappa,
            "lam": self.lam,
            "lambda_eff": self.lambda_eff,
            "mu": None if self.mu is None else self.mu.tolist(),
            "normalize": self.normalize,
            "relax_svm": self.relax_svm,
        }


@dataclass(frozen=True, eq=False)
class SupervisedLearnerState:
    model: LearnerModel
    w: np.ndarray
    hyper: Hyper = field(default_factory=Hyper)
    t: int = 0  # steps taken so far

    def __post_init__(self):
        if not self.model.supervised:
            raise DomainError(f"{self.model.value} is not a supervised model")
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 1:
            raise DimensionError(f"w must be a vector, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise NumericalError("weights contain NaN or Inf")
        if self.model is LearnerModel.EXPGRAD:
            self.hyper.prior(w.size)
            if not np.all(w > 0):
                raise DomainError("exponentiated-gradient weights must stay strictly positive")
        object.__setattr__(self, 'w', w)

    @classmethod
    def initial(cls, model: LearnerModel, n: int, hyper: Hyper = Hyper()) -> "SupervisedLearnerState":
        """w = 0, or w = mu (the entropy minimiser) for the positive learner."""
        w = hyper.prior(n).copy() if model is LearnerModel.EXPGRAD else np.zeros(n)
        return cls(model=model, w=w, hyper=hyper)

    @property
    def n(self) -> int:
        return self.w.size

    def snapshot(self) -> Dict[str, Any]:
        return {"w": self.w.tolist(), "t": self.t}


@dataclass
class StepOutcome:
    z: Any                    # float for supervised models, vector for similarity matching
    update_norm: float
    dynamics_iters: int
    residual: float = 0.0
    relative_update: Optional[float] = None


def hebbian_update(w: np.ndarray, x: np.ndarray, z: float, eta: float,
                   modulator: float = 1.0, decay: float = 0.0) -> np.ndarray:
    """Delta w_i = eta (z * modulator * x_i - decay * w_i); synapse i sees only x_i, w_i, z."""
    return eta * (z * modulator * x - decay * w)


def _relative_update(dw: np.ndarray, w: np.ndarray) -> Optional[float]:
    active = w != 0
    if not np.any(active):
        return None
    return float(np.mean(np.abs(dw[active]) / np.abs(w[active])))


def _sample(state: SupervisedLearnerState, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != state.w.shape:
        raise DimensionError(f"sample has shape {x.shape}, weights have {state.w.shape}")
    return x


def _advance(state: SupervisedLearnerState, w_next: np.ndarray, z, iters: int, residual: float
             ) -> Tuple[StepOutcome, SupervisedLearnerState]:
    dw = w_next - state.w
    if not np.all(np.isfinite(w_next)):
        raise NumericalError(f"{state.model.value} update produced non-finite weights")
    outcome = StepOutcome(
        z=z,
        update_norm=float(np.linalg.norm(dw)),
        dynamics_iters=iters,
        residual=residual,
        relative_update=_relative_update(dw, state.w),
    )
    return outcome, dataclasses.replace(state, w=w_next, t=state.t + 1)


def ridge_step(state: SupervisedLearnerState, x, y: float, eta: Optional[float] = None,
               dynamics: DynamicsConfig = DynamicsConfig()) -> Tuple[StepOutcome, SupervisedLearnerState]:
    """z settles to the prediction error; Delta w = eta (z x - lambda_eff w)."""
    x = _sample(state, x)
    eta = state.hyper.eta if eta is None else eta
    settled = relax_ridge(state.w, x, float(y), dynamics)
    dw = hebbian_update(state.w, x, settled.z, eta, decay=state.hyper.lambda_eff)
    return _advance(state, state.w + dw, settled.z, settled.iters, settled.residual)


def svm_step(state: SupervisedLearnerState, x, y: float, eta: Optional[float] = None,
             dynamics: DynamicsConfig = DynamicsConfig()) -> Tuple[StepOutcome, SupervisedLearnerState]:
    """Rectified margin violation; passive (w untouched) once y w.x >= 1."""
    check_binary_labels(y)
    x = _sample(state, x)
    eta = state.hyper.eta if eta is None else eta
    if state.hyper.relax_svm:
        settled = svm_relax(state.w, x, float(y), state.hyper.kappa, dynamics)
        z, iters, residual = settled.z, settled.iters, settled.residual
    else:
        z, iters, residual = svm_activation(state.w, x, float(y), state.hyper.kappa), 0, 0.0

    if z == 0.0:
        outcome = StepOutcome(z=0.0, update_norm=0.0, dynamics_iters=iters, residual=residual,
                              relative_update=_relative_update(np.zeros_like(state.w), state.w))
        return outcome, dataclasses.replace(state, t=state.t + 1)
    dw = hebbian_update(state.w, x, z, eta, modulator=float(y))
    return _advance(state, state.w + dw, z, iters, residual)


def logistic_step(state: SupervisedLearnerState, x, y: float, eta: Optional[float] = None,
                  dynamics: DynamicsConfig = DynamicsConfig()) -> Tuple[StepOutcome, SupervisedLearnerState]:
    check_binary_labels(y)
    x = _sample(state, x)
    eta = state.hyper.eta if eta is None else eta
    settled = relax_logistic(state.w, x, float(y), dynamics)
    dw = hebbian_update(state.w, x, settled.z, eta, modulator=float(y))
    return _advance(state, state.w + dw, settled.z, settled.iters, settled.residual)


def expgrad_step(state: SupervisedLearnerState, x, y: float, eta: Optional[float] = None,
                 dynamics: DynamicsConfig = DynamicsConfig()) -> Tuple[StepOutcome, SupervisedLearnerState]:
    """
    Multiplicative Hebbian rule w_k <- w_k exp(eta z x_k).

    With hyper.normalize the result is rescaled so the total mass sum_k w_k is
    unchanged (exponentiated gradient on a scaled simplex).
    """
    x = _sample(state, x)
    eta = state.hyper.eta if eta is None else eta
    settled = relax_ridge(state.w, x, float(y), dynamics)
    exponent = eta * settled.z * x
    worst = float(np.max(np.abs(exponent), initial=0.0))
    if worst > Config.EXPGRAD_EXPONENT_GUARD:
        raise StepSizeError(f"multiplicative update exponent {worst:.3g} exceeds {Config.EXPGRAD_EXPONENT_GUARD}")

    w_next = state.w * np.exp(exponent)
    if state.hyper.normalize:
        w_next = w_next * (state.w.sum() / w_next.sum())
    if not np.all(w_next > 0):
        raise NumericalError("multiplicative update underflowed to a non-positive weight")
    return _advance(state, w_next, settled.z, settled.iters, settled.residual)


SUPERVISED_STEPS = {
    LearnerModel.RIDGE: ridge_step,
    LearnerModel.SVM: svm_step,
    LearnerModel.LOGISTIC: logistic_step,
    LearnerModel.EXPGRAD: expgrad_step,
}


def supervised_step(state: SupervisedLearnerState, x, y: float, eta: Optional[float] = None,
                    dynamics: DynamicsConfig = DynamicsConfig()) -> Tuple[StepOutcome, SupervisedLearnerState]:
    return SUPERVISED_STEPS[state.model](state, x, y, eta=eta, dynamics=dynamics)
