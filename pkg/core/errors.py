"""
Exception hierarchy shared by the duality core, dynamics, learners and oracles.

Everything derives from DualityError (a ValueError) so callers that only care
about "bad numerical input" can catch one type.
"""
from typing import Optional


class DualityError(ValueError):
    """Base class for every error raised by the toolkit."""


class LabelError(DualityError):
    """A classification loss received a label outside {-1, +1}."""


class DimensionError(DualityError):
    """Vector / matrix shapes do not agree."""


class DomainError(DualityError):
    """An argument lies outside the domain of the function (or dual feasible set)."""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class ConvergenceError(DualityError):
    """An iterative procedure hit its iteration cap."""

    def __init__(self, message: str, residual: float, iters: int):
        super().__init__(f"{message} (residual={residual:.3e}, iters={iters})")
        self.residual = residual
        self.iters = iters


class NumericalError(DualityError):
    """NaN/Inf appeared, or a linear system was singular."""


class StabilityError(DualityError):
    """The lateral matrix M is no longer positive definite."""

    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(f"{message} (min eigenvalue={min_eigenvalue:.3e})")
        self.min_eigenvalue = min_eigenvalue


class StepSizeError(DualityError):
    """A step was too aggressive: exponent guard tripped or ascent diverged."""


class OrthonormalityError(DualityError):
    """A basis passed to a subspace metric is not orthonormal."""


class TrainingError(DualityError):
    """A learner step failed; records where in the run it happened."""

    def __init__(self, epoch: int, index: int, cause: Exception):
        super().__init__(f"step failed at epoch {epoch}, sample {index}: {cause}")
        self.epoch = epoch
        self.index = index
        self.cause = cause
