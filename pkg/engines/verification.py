"""
Oracle checks for a finished run, and the one-row summaries used to compare runs.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from config import Config
from core.duality import DualModel, dual_weights, model_primal_objective, sigmoid
from core.errors import DimensionError
from core.logger import RunLogger
from datagen.dataset import Dataset
from oracles.batch import batch_dual_solve, duality_gap, ridge_closed_form
from oracles.linalg import min_eigenvalue, orthonormal_basis, pca_subspace, span_residual, subspace_error
from utils.helpers import format_float
from .learners import Hyper, LearnerModel
from .trainer import RunReport

logger = logging.getLogger(__name__)


class CheckStatus(Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    SKIPPED = "SKIPPED"
    INFO = "INFO"


@dataclass
class Check:
    name: str
    status: CheckStatus
    value: Optional[float] = None
    threshold: Optional[float] = None
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check": self.name,
            "status": self.status.value,
            "value": self.value,
            "threshold": self.threshold,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class Tolerances:
    weights: float = Config.TOL_WEIGHTS
    gap: float = Config.TOL_GAP
    kkt: float = Config.TOL_KKT
    span: float = Config.TOL_SPAN
    eq21: float = Config.TOL_EQ21
    subspace: float = Config.TOL_SUBSPACE
    mse: float = Config.TOL_MSE
    fixed_point: float = Config.TOL_FIXED_POINT


def _bounded(name: str, value: float, threshold: float, detail: str = "") -> Check:
    status = CheckStatus.PASS if np.isfinite(value) and value <= threshold else CheckStatus.FAIL
    return Check(name, status, float(value), threshold, detail)


def _skipped(name: str, reason: str) -> Check:
    return Check(name, CheckStatus.SKIPPED, detail=reason)


def all_passed(checks: List[Check]) -> bool:
    return all(c.status is not CheckStatus.FAIL for c in checks)


def _hyper_from(report: RunReport) -> Hyper:
    h = report.hyper
    return Hyper(
        eta=h.get("eta", 0.1),
        kappa=h.get("kappa", 1.0),
        lam=h.get("lam", 1.0),
        lambda_eff=h.get("lambda_eff", 0.0),
        mu=h.get("mu"),
        normalize=h.get("normalize", False),
        relax_svm=h.get("relax_svm", False),
    )


def _final_weights(report: RunReport, n: int) -> np.ndarray:
    w = np.asarray(report.final_state.get("w"), dtype=float)
    if w.shape != (n,):
        raise DimensionError(f"report weights have shape {w.shape}, dataset has n={n}")
    return w


def _recorded_residual(report: RunReport, tol: float) -> Check:
    residual = report.verification.get("fixed_point_residuals")
    if residual is None:
        return _skipped("network_fixed_point_residual", "no training steps recorded")
    return _bounded("network_fixed_point_residual", residual, tol, "largest dynamics residual during training")


def _ridge_checks(report: RunReport, dataset: Dataset, tol: Tolerances) -> List[Check]:
    X, y = dataset.X, dataset.y
    hyper = _hyper_from(report)
    params = hyper.dual_params(dataset.n)
    w = _final_weights(report, dataset.n)

    w_oracle = ridge_closed_form(X, y, hyper.lam)
    distance = np.linalg.norm(w - w_oracle) / max(float(np.linalg.norm(w_oracle)), 1e-30)
    solved = batch_dual_solve(DualModel.RIDGE, X, y, params)
    w_dual = dual_weights(DualModel.RIDGE, solved.z, X, y, params)
    eq21 = float(np.max(np.abs(solved.z - (y - X.T @ w_dual))))
    gap = duality_gap(DualModel.RIDGE, X, y, w_oracle, solved.z, params)
    suboptimality = (model_primal_objective(DualModel.RIDGE, w, X, y, params)
                     - model_primal_objective(DualModel.RIDGE, w_oracle, X, y, params))
    return [
        _bounded("oracle_distance", distance, tol.weights, "relative distance to the closed-form ridge solution"),
        _bounded("duality_gap", gap, tol.gap, "gap at the oracle primal/dual pair"),
        _bounded("span_residual", span_residual(w, X), tol.span, "learned weights outside span{x_t}"),
        _bounded("error_identity_residual", eq21, tol.eq21, "max |z_t - (y_t - w.x_t)| after dual ascent"),
        Check("primal_suboptimality", CheckStatus.INFO, float(suboptimality), None, "P(w_learned) - P(w_oracle)"),
    ]


def _classifier_checks(report: RunReport, dataset: Dataset, model: LearnerModel, tol: Tolerances) -> List[Check]:
    X, y = dataset.X, dataset.y
    hyper = _hyper_from(report)
    params = hyper.dual_params(dataset.n)
    dual_model = model.dual_model
    w = _final_weights(report, dataset.n)

    solved = batch_dual_solve(dual_model, X, y, params)
    w_hat = dual_weights(dual_model, solved.z, X, y, params)
    margins = y * (X.T @ w_hat)
    if dual_model is DualModel.SVM:
        expected = np.maximum(0.0, 1.0 - margins) / hyper.kappa
    else:
        expected = np.asarray(sigmoid(-margins))
    identity = float(np.max(np.abs(solved.z - expected)))
    gap = duality_gap(dual_model, X, y, w_hat, solved.z, params)
    accuracy = float(np.mean(np.sign(X.T @ w) == y))
    return [
        _bounded("kkt_residual", solved.kkt_residual, tol.kkt, f"projected dual ascent, {solved.iters} iterations"),
        _bounded("fixed_point_identity", identity, tol.fixed_point, "oracle duals against the network's activation"),
        _bounded("duality_gap", gap, tol.gap, "gap at the oracle primal/dual pair"),
        _recorded_residual(report, tol.fixed_point),
        _bounded("span_residual", span_residual(w, X), tol.span, "learned weights outside span{x_t}"),
        Check("training_accuracy", CheckStatus.INFO, accuracy),
    ]


def _expgrad_checks(report: RunReport, dataset: Dataset, tol: Tolerances) -> List[Check]:
    w = _final_weights(report, dataset.n)
    recorded = [row.min_weight for row in report.epochs if row.min_weight is not None]
    smallest = float(min(recorded + [float(np.min(w))]))
    positivity = Check("positivity", CheckStatus.PASS if smallest > 0 else CheckStatus.FAIL, smallest, 0.0,
                       "smallest weight seen at any epoch boundary")
    mse = float(np.mean((dataset.y - dataset.X.T @ w) ** 2))
    return [
        positivity,
        _bounded("prediction_mse", mse, tol.mse, "final training mean squared error"),
        _recorded_residual(report, tol.fixed_point),
        Check("span_residual", CheckStatus.INFO, span_residual(w, dataset.X)),
    ]


def _subspace_checks(report: RunReport, dataset: Dataset, model: LearnerModel, tol: Tolerances) -> List[Check]:
    W = np.asarray(report.final_state.get("W"), dtype=float)
    if W.ndim != 2 or W.shape[1] != dataset.n:
        raise DimensionError(f"report filters have shape {W.shape}, dataset has n={dataset.n}")
    checks: List[Check] = []
    if model is LearnerModel.SM:
        M = np.asarray(report.final_state.get("M"), dtype=float)
        smallest = min_eigenvalue(M)
        checks.append(Check("lateral_stability", CheckStatus.PASS if smallest >= Config.PD_EPS else CheckStatus.FAIL,
                            smallest, Config.PD_EPS, "smallest eigenvalue of M"))
        if smallest < Config.PD_EPS:
            return checks
        filters = np.linalg.solve(M, W)
    else:
        filters = W
    learned = orthonormal_basis(filters.T)
    m = learned.shape[1]

    reference = pca_subspace(dataset.X, m)
    checks.append(_bounded("subspace_error", subspace_error(learned, reference.basis), tol.subspace,
                           "learned filters against the top principal subspace of the data"
                           + (" (degenerate eigengap)" if reference.degenerate else "")))
    truth = dataset.truth.basis if dataset.truth is not None else None
    if truth is None or truth.shape != (dataset.n, m):
        checks.append(_skipped("truth_subspace_error", "dataset carries no planted basis of matching size"))
    else:
        checks.append(_bounded("truth_subspace_error", subspace_error(learned, truth), tol.subspace,
                               "learned filters against the planted basis"))
    checks.append(_recorded_residual(report, tol.fixed_point))
    return checks


def verify_run(report: RunReport, dataset: Dataset, tol: Tolerances = Tolerances(),
               run_logger: Optional[RunLogger] = None) -> List[Check]:
    """Recompute the oracle quantities appropriate to the report's model."""
    model = LearnerModel(report.model)
    if model.supervised and not dataset.has_labels:
        checks = [_skipped("oracle_checks", "dataset has no labels")]
    elif model is LearnerModel.RIDGE:
        checks = _ridge_checks(report, dataset, tol)
    elif model.classification:
        checks = _classifier_checks(report, dataset, model, tol)
    elif model is LearnerModel.EXPGRAD:
        checks = _expgrad_checks(report, dataset, tol)
    else:
        checks = _subspace_checks(report, dataset, model, tol)

    for check in checks:
        logger.debug(f"{check.name}: {check.status.value} value={check.value} threshold={check.threshold}")
        if run_logger:
            run_logger.log_check(check.name, check.status.value, check.value, check.threshold)
    return checks


SUMMARY_COLUMNS = [
    "model",
    "seed",
    "eta",
    "lam",
    "kappa",
    "epochs",
    "primal_objective",
    "duality_gap",
    "update_density",
    "train_error",
    "oracle_distance",
    "span_residual",
    "subspace_error",
    "update_norm_trajectory",
    "relative_update_trajectory",
    "source",
]


def summary_row(report: RunReport, source: str) -> Dict[str, Any]:
    """One comparison row; trajectories hold one value per trained epoch."""
    final = report.final_epoch if report.epochs else None
    hyper = report.hyper
    trained = report.epochs[1:]
    return {
        "model": report.model,
        "seed": report.provenance.get("seed"),
        "eta": hyper.get("eta", hyper.get("eta_w")),
        "lam": hyper.get("lam"),
        "kappa": hyper.get("kappa"),
        "epochs": report.epochs_requested,
        "primal_objective": None if final is None else final.primal_objective,
        "duality_gap": None if final is None else final.duality_gap,
        "update_density": None if final is None else final.update_density,
        "train_error": None if final is None else final.train_error,
        "oracle_distance": report.verification.get("oracle_distance"),
        "span_residual": report.verification.get("span_residual"),
        "subspace_error": report.verification.get("subspace_error"),
        "update_norm_trajectory": [row.mean_update_norm for row in trained],
        "relative_update_trajectory": [row.mean_relative_update for row in trained],
        "source": source,
    }


TRAJECTORY_COLUMNS = ("update_norm_trajectory", "relative_update_trajectory")


def flatten_summary_row(row: Dict[str, Any]) -> Dict[str, Any]:
    """CSV view of a summary row: trajectories ';'-joined, undefined epochs left empty."""
    return dict(row, **{column: ";".join("" if v is None else format_float(v) for v in row[column])
                        for column in TRAJECTORY_COLUMNS})


def summary_sort_key(row: Dict[str, Any]):
    """Model name, then seed as an integer (9 before 10, unseeded last), then source path."""
    seed = row.get("seed")
    return (row["model"], seed is None, seed if seed is not None else 0, row["source"])
