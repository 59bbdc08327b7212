"""
Epoch loop shared by every learner, and the RunReport it produces.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Union

import numpy as np

from config import Config
from core.duality import (
    check_binary_labels,
    dual_objective,
    model_primal_objective,
    sigmoid,
    similarity_matching_objective,
)
from core.dynamics import DynamicsConfig
from core.errors import DimensionError, DualityError, LabelError, TrainingError
from core.logger import RunLogger
from core.numeric import make_rng
from datagen.dataset import Dataset
from oracles.batch import ridge_closed_form
from oracles.linalg import pca_subspace, span_residual, subspace_error
from utils.helpers import frame_to_csv, load_json, to_plain, write_csv, write_json
from .learners import LearnerModel, Schedule, StepOutcome, SupervisedLearnerState, supervised_step
from .similarity_matching import OjaState, SimilarityMatchingState, oja_step, sm_step

logger = logging.getLogger(__name__)

LearnerState = Union[SupervisedLearnerState, SimilarityMatchingState, OjaState]

CSV_COLUMNS = [
    "epoch",
    "primal_objective",
    "dual_objective",
    "duality_gap",
    "mean_update_norm",
    "update_density",
    "train_error",
]


@dataclass
class EpochRecord:
    epoch: int
    primal_objective: Optional[float] = None
    dual_objective: Optional[float] = None
    duality_gap: Optional[float] = None
    mean_update_norm: Optional[float] = None
    max_update_norm: Optional[float] = None
    update_density: Optional[float] = None
    train_error: Optional[float] = None
    subspace_error: Optional[float] = None
    mean_relative_update: Optional[float] = None
    min_weight: Optional[float] = None
    fixed_point_residual: Optional[float] = None
    z: Optional[List[float]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epoch": self.epoch,
            "primal_objective": self.primal_objective,
            "dual_objective": self.dual_objective,
            "duality_gap": self.duality_gap,
            "mean_update_norm": self.mean_update_norm,
            "max_update_norm": self.max_update_norm,
            "update_density": self.update_density,
            "train_error": self.train_error,
            "subspace_error": self.subspace_error,
            "mean_relative_update": self.mean_relative_update,
            "min_weight": self.min_weight,
            "fixed_point_residual": self.fixed_point_residual,
            "z": self.z,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EpochRecord":
        return cls(**{k: data.get(k) for k in cls.__dataclass_fields__})


@dataclass
class RunReport:
    model: str
    hyper: Dict[str, Any]
    schedule: Dict[str, Any]
    epochs_requested: int
    initial_state: Dict[str, Any]
    final_state: Dict[str, Any]
    epochs: List[EpochRecord] = field(default_factory=list)
    verification: Dict[str, Any] = field(default_factory=dict)
    provenance: Dict[str, Any] = field(default_factory=dict)
    learner: Optional[Any] = field(default=None, repr=False, compare=False)  # final state object, not serialized

    @property
    def final_epoch(self) -> EpochRecord:
        return self.epochs[-1]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "model": self.model,
            "hyper": self.hyper,
            "schedule": self.schedule,
            "epochs_requested": self.epochs_requested,
            "initial_state": self.initial_state,
            "final_state": self.final_state,
            "epochs": [record.to_dict() for record in self.epochs],
            "verification": self.verification,
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunReport":
        try:
            return cls(
                model=data["model"],
                hyper=data["hyper"],
                schedule=data["schedule"],
                epochs_requested=int(data["epochs_requested"]),
                initial_state=data["initial_state"],
                final_state=data["final_state"],
                epochs=[EpochRecord.from_dict(row) for row in data["epochs"]],
                verification=data.get("verification") or {},
                provenance=data.get("provenance") or {},
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ValueError(f"malformed run report: {e}") from e

    def save(self, path):
        return write_json(path, self.to_dict())

    @classmethod
    def load(cls, path) -> "RunReport":
        return cls.from_dict(load_json(path))

    def csv_text(self) -> str:
        return frame_to_csv([record.to_dict() for record in self.epochs], CSV_COLUMNS)

    def save_csv(self, path):
        return write_csv(path, [record.to_dict() for record in self.epochs], CSV_COLUMNS)


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

def _model_of(state: LearnerState) -> LearnerModel:
    if isinstance(state, SupervisedLearnerState):
        return state.model
    return LearnerModel.SM if isinstance(state, SimilarityMatchingState) else LearnerModel.OJA


def _induced_duals(state: SupervisedLearnerState, X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Dual activities the network would settle to for every sample at the current weights."""
    u = X.T @ state.w
    if state.model is LearnerModel.SVM:
        return np.maximum(0.0, 1.0 - y * u) / state.hyper.kappa
    if state.model is LearnerModel.LOGISTIC:
        return np.clip(sigmoid(-y * u), Config.LOGISTIC_EPS, 1.0 - Config.LOGISTIC_EPS)
    return y - u


def _train_error(model: LearnerModel, w: np.ndarray, X: np.ndarray, y: np.ndarray) -> float:
    u = X.T @ w
    if model.classification:
        return float(np.mean(np.sign(u) != y))
    return float(np.mean((y - u) ** 2))


def _supervised_record(epoch: int, state: SupervisedLearnerState, dataset: Dataset,
                       z: np.ndarray) -> EpochRecord:
    X, y = dataset.X, dataset.y
    model = state.model.dual_model
    params = state.hyper.dual_params(dataset.n)
    primal = model_primal_objective(model, state.w, X, y, params)
    dual = dual_objective(model, z, X, y, params)
    return EpochRecord(
        epoch=epoch,
        primal_objective=primal,
        dual_objective=dual,
        duality_gap=primal - dual,
        train_error=_train_error(state.model, state.w, X, y),
        min_weight=float(np.min(state.w)),
        z=z.tolist(),
    )


def _subspace_record(epoch: int, state: Union[SimilarityMatchingState, OjaState], dataset: Dataset,
                     reference: np.ndarray, Z: Optional[np.ndarray]) -> EpochRecord:
    error = subspace_error(state.basis(), reference)
    return EpochRecord(
        epoch=epoch,
        dual_objective=None if Z is None else similarity_matching_objective(dataset.X, Z),
        train_error=error,
        subspace_error=error,
        min_weight=float(np.min(state.W)),
    )


def _fill_step_stats(record: EpochRecord, outcomes: List[StepOutcome]) -> EpochRecord:
    norms = np.array([o.update_norm for o in outcomes])
    relative = [o.relative_update for o in outcomes if o.relative_update is not None]
    record.mean_update_norm = float(norms.mean())
    record.max_update_norm = float(norms.max())
    record.update_density = float(np.mean(norms > Config.UPDATE_DENSITY_THRESHOLD))
    record.mean_relative_update = float(np.mean(relative)) if relative else None
    record.fixed_point_residual = float(max(o.residual for o in outcomes))
    return record


def _check_compatible(state: LearnerState, dataset: Dataset) -> None:
    model = _model_of(state)
    if dataset.T == 0:
        raise DimensionError("dataset has no samples")
    if state.n != dataset.n:
        raise DimensionError(f"learner expects n={state.n} features, dataset has n={dataset.n}")
    if model.supervised and not dataset.has_labels:
        raise LabelError(f"{model.value} needs a labelled dataset")
    if model.classification:
        check_binary_labels(dataset.y)


def _verification(state: LearnerState, dataset: Dataset, reference: Optional[np.ndarray],
                  max_residual: Optional[float]) -> Dict[str, Any]:
    block: Dict[str, Any] = {
        "oracle_distance": None,
        "span_residual": None,
        "subspace_error": None,
        "fixed_point_residuals": max_residual,
    }
    if isinstance(state, SupervisedLearnerState):
        block["span_residual"] = span_residual(state.w, dataset.X) if np.any(state.w) else 0.0
        if state.model is LearnerModel.RIDGE:
            oracle = ridge_closed_form(dataset.X, dataset.y, state.hyper.lam)
            scale = max(float(np.linalg.norm(oracle)), 1e-30)
            block["oracle_distance"] = float(np.linalg.norm(state.w - oracle) / scale)
    else:
        block["subspace_error"] = subspace_error(state.basis(), reference)
    return block


# ---------------------------------------------------------------------------
# training loop
# ---------------------------------------------------------------------------

def _step(state: LearnerState, x: np.ndarray, y: Optional[float], factor: float, dynamics: DynamicsConfig):
    if isinstance(state, SupervisedLearnerState):
        return supervised_step(state, x, y, eta=state.hyper.eta * factor, dynamics=dynamics)
    if isinstance(state, SimilarityMatchingState):
        return sm_step(state, x, eta_w=state.hyper.eta_w * factor, eta_m=state.hyper.eta_m * factor,
                       dynamics=dynamics)
    return oja_step(state, x, eta=state.hyper.eta * factor)


def train(
    state: LearnerState,
    dataset: Dataset,
    epochs: int,
    schedule: Schedule = Schedule(),
    dynamics: DynamicsConfig = DynamicsConfig(),
    shuffle_seed: Optional[int] = None,
    seed: Optional[int] = None,
    run_logger: Optional[RunLogger] = None,
) -> RunReport:
    """
    Sweep the dataset `epochs` times, one online step per sample.

    Row 0 of the report describes the initial state; row k the state after
    epoch k together with the activities and update sizes seen during it.
    With shuffle_seed the visiting order is a fresh seeded permutation per
    epoch, otherwise samples are visited in dataset order.
    """
    if int(epochs) < 0:
        raise ValueError(f"epochs must be >= 0, got {epochs}")
    _check_compatible(state, dataset)
    model = _model_of(state)
    T = dataset.T
    order_rng = make_rng(shuffle_seed) if shuffle_seed is not None else None

    reference = None
    if not model.supervised:
        reference = pca_subspace(dataset.X, state.hyper.m).basis

    def record_for(epoch: int, current: LearnerState, activities) -> EpochRecord:
        if isinstance(current, SupervisedLearnerState):
            return _supervised_record(epoch, current, dataset, activities)
        return _subspace_record(epoch, current, dataset, reference, activities)

    initial_state = state.snapshot()
    if isinstance(state, SupervisedLearnerState):
        initial_activities = _induced_duals(state, dataset.X, dataset.y)
    else:
        initial_activities = None
    records = [record_for(0, state, initial_activities)]
    max_residual: Optional[float] = None

    for epoch in range(1, int(epochs) + 1):
        order = order_rng.permutation(T) if order_rng is not None else np.arange(T)
        outcomes: List[StepOutcome] = []
        activities = np.zeros(T) if model.supervised else np.zeros((state.hyper.m, T))

        for index in order:
            index = int(index)
            label = float(dataset.y[index]) if model.supervised else None
            try:
                outcome, state = _step(state, dataset.sample(index), label, schedule.factor(state.t), dynamics)
            except DualityError as e:
                if run_logger:
                    run_logger.log_error(type(e).__name__, str(e), {"epoch": epoch, "index": index})
                raise TrainingError(epoch, index, e) from e
            outcomes.append(outcome)
            if model.supervised:
                activities[index] = outcome.z
            else:
                activities[:, index] = outcome.z

        record = _fill_step_stats(record_for(epoch, state, activities), outcomes)
        records.append(record)
        max_residual = record.fixed_point_residual if max_residual is None else max(max_residual, record.fixed_point_residual)
        logger.debug(f"{model.value} epoch {epoch}: train_error={record.train_error:.4e} "
                     f"density={record.update_density:.3f}")
        if run_logger:
            run_logger.log_epoch(model.value, record.to_dict())

    report = RunReport(
        model=model.value,
        hyper=state.hyper.to_dict(),
        schedule=schedule.to_dict(),
        epochs_requested=int(epochs),
        initial_state=initial_state,
        final_state=state.snapshot(),
        epochs=records,
        verification=to_plain(_verification(state, dataset, reference, max_residual)),
        provenance={
            "dataset": dataset.meta.to_dict(),
            "seed": seed,
            "shuffle": shuffle_seed is not None,
            "shuffle_seed": shuffle_seed,
            "dynamics": {"step": dynamics.step, "tol": dynamics.tol, "max_iters": dynamics.max_iters},
            "tool": Config.TOOL_NAME,
            "version": Config.VERSION,
        },
        learner=state,
    )
    logger.info(f"{model.value}: {epochs} epochs, final train_error={report.final_epoch.train_error:.4e}")
    return report
