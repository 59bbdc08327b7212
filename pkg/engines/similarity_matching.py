"""
Similarity matching network (feedforward W, lateral inhibition M) and the
single-layer Oja subspace rule it is compared against.
"""
import dataclasses
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from config import Config
from core.dynamics import DynamicsConfig, FixedPointMode, check_lateral_stability, relax_similarity
from core.errors import DimensionError, DomainError, NumericalError
from core.numeric import make_rng
from oracles.linalg import orthonormal_basis
from .learners import StepOutcome

logger = logging.getLogger(__name__)


def _uniform_filters(m: int, n: int, seed: int) -> np.ndarray:
    half_width = Config.SM_INIT_HALF_WIDTH
    return make_rng(seed).uniform(-half_width, half_width, size=(m, n))


def _check_output_dim(m: int, n: int) -> None:
    if not 1 <= m <= n:
        raise DomainError(f"output dimension m={m} must lie in [1, n={n}]")


@dataclass(frozen=True)
class SMHyper:
    eta_w: float = 0.05
    eta_m: float = 0.05
    m: int = 1
    mode: FixedPointMode = FixedPointMode.RELAX

    def __post_init__(self):
        if not self.eta_w > 0 or not self.eta_m > 0:
            raise DomainError(f"learning rates must be positive, got eta_w={self.eta_w}, eta_m={self.eta_m}")
        if int(self.m) < 1:
            raise DomainError(f"output dimension must be >= 1, got {self.m}")

    def to_dict(self) -> Dict[str, Any]:
        return {"eta_w": self.eta_w, "eta_m": self.eta_m, "m": self.m, "fixed_point": self.mode.value}


@dataclass(frozen=True, eq=False)
class SimilarityMatchingState:
    W: np.ndarray   # m x n feedforward
    M: np.ndarray   # m x m lateral, symmetric positive definite
    hyper: SMHyper
    t: int = 0

    def __post_init__(self):
        W = np.asarray(self.W, dtype=float)
        M = np.asarray(self.M, dtype=float)
        if W.ndim != 2 or M.shape != (W.shape[0], W.shape[0]) or W.shape[0] != self.hyper.m:
            raise DimensionError(f"W {W.shape} and M {M.shape} do not match m={self.hyper.m}")
        _check_output_dim(W.shape[0], W.shape[1])
        if not (np.all(np.isfinite(W)) and np.all(np.isfinite(M))):
            raise NumericalError("network weights contain NaN or Inf")
        check_lateral_stability(M)
        object.__setattr__(self, 'W', W)
        object.__setattr__(self, 'M', M)

    @classmethod
    def initial(cls, n: int, hyper: SMHyper, seed: int = 0) -> "SimilarityMatchingState":
        """W ~ uniform(-0.1, 0.1) from the run seed, M = I."""
        _check_output_dim(hyper.m, n)
        return cls(W=_uniform_filters(hyper.m, n, seed), M=np.eye(hyper.m), hyper=hyper)

    @property
    def n(self) -> int:
        return self.W.shape[1]

    def filters(self) -> np.ndarray:
        """Effective input-output map M^-1 W (rows are the learned filters)."""
        return np.linalg.solve(self.M, self.W)

    def basis(self) -> np.ndarray:
        return orthonormal_basis(self.filters().T)

    def snapshot(self) -> Dict[str, Any]:
        return {"W": self.W.tolist(), "M": self.M.tolist(), "t": self.t}


def sm_step(state: SimilarityMatchingState, x, eta_w: Optional[float] = None, eta_m: Optional[float] = None,
            dynamics: DynamicsConfig = DynamicsConfig()) -> Tuple[StepOutcome, SimilarityMatchingState]:
    """
    One online step: settle M z = W x, then

        W <- W + eta_w (z x^T - W)     (Hebbian)
        M <- M + eta_m (z z^T - M)     (anti-Hebbian lateral)
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (state.n,):
        raise DimensionError(f"sample has shape {x.shape}, expected ({state.n},)")
    eta_w = state.hyper.eta_w if eta_w is None else eta_w
    eta_m = state.hyper.eta_m if eta_m is None else eta_m

    settled = relax_similarity(state.W, state.M, x, dynamics, state.hyper.mode, check_stability=False)
    z = settled.z
    dW = eta_w * (np.outer(z, x) - state.W)
    dM = eta_m * (np.outer(z, z) - state.M)
    M_next = state.M + dM
    M_next = 0.5 * (M_next + M_next.T)

    # the new state re-checks positive definiteness of M
    next_state = dataclasses.replace(state, W=state.W + dW, M=M_next, t=state.t + 1)
    w_norm = float(np.linalg.norm(state.W))
    outcome = StepOutcome(
        z=z,
        update_norm=float(np.linalg.norm(dW) + np.linalg.norm(dM)),
        dynamics_iters=settled.iters,
        residual=settled.residual,
        relative_update=float(np.linalg.norm(dW) / w_norm) if w_norm > 0 else None,
    )
    return outcome, next_state


@dataclass(frozen=True)
class OjaHyper:
    eta: float = 0.01
    m: int = 1

    def __post_init__(self):
        if not self.eta > 0:
            raise DomainError(f"learning rate must be positive, got {self.eta}")
        if int(self.m) < 1:
            raise DomainError(f"output dimension must be >= 1, got {self.m}")

    def to_dict(self) -> Dict[str, Any]:
        return {"eta": self.eta, "m": self.m}


@dataclass(frozen=True, eq=False)
class OjaState:
    W: np.ndarray   # m x n
    hyper: OjaHyper
    t: int = 0

    def __post_init__(self):
        W = np.asarray(self.W, dtype=float)
        if W.ndim != 2 or W.shape[0] != self.hyper.m:
            raise DimensionError(f"W has shape {W.shape}, expected ({self.hyper.m}, n)")
        _check_output_dim(W.shape[0], W.shape[1])
        if not np.all(np.isfinite(W)):
            raise NumericalError("Oja filters contain NaN or Inf")
        object.__setattr__(self, 'W', W)

    @classmethod
    def initial(cls, n: int, hyper: OjaHyper, seed: int = 0) -> "OjaState":
        _check_output_dim(hyper.m, n)
        return cls(W=_uniform_filters(hyper.m, n, seed), hyper=hyper)

    @property
    def n(self) -> int:
        return self.W.shape[1]

    def filters(self) -> np.ndarray:
        return self.W

    def basis(self) -> np.ndarray:
        return orthonormal_basis(self.W.T)

    def snapshot(self) -> Dict[str, Any]:
        return {"W": self.W.tolist(), "t": self.t}


def oja_step(state: OjaState, x, eta: Optional[float] = None) -> Tuple[StepOutcome, OjaState]:
    """Subspace rule without lateral connections: Delta W = eta (y x^T - y y^T W), y = W x."""
    x = np.asarray(x, dtype=float)
    if x.shape != (state.n,):
        raise DimensionError(f"sample has shape {x.shape}, expected ({state.n},)")
    eta = state.hyper.eta if eta is None else eta
    y = state.W @ x
    dW = eta * (np.outer(y, x) - np.outer(y, y) @ state.W)
    next_state = dataclasses.replace(state, W=state.W + dW, t=state.t + 1)
    w_norm = float(np.linalg.norm(state.W))
    outcome = StepOutcome(
        z=y,
        update_norm=float(np.linalg.norm(dW)),
        dynamics_iters=0,
        relative_update=float(np.linalg.norm(dW) / w_norm) if w_norm > 0 else None,
    )
    return outcome, next_state
