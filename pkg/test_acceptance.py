"""
Desk-scale acceptance runs: online learners against their batch oracles.
"""
import numpy as np
import pytest
from scipy.special import expit

from core.duality import (
    DualModel,
    DualParams,
    LossModel,
    RegularizerModel,
    dual_gradient,
    dual_objective,
    dual_weights,
    entropy_barrier,
    loss_subgradient,
    loss_value,
    weights_from_duals,
)
from core.dynamics import DynamicsConfig, FixedPointMode, relax_logistic
from datagen.generators import gen_classification, gen_regression, gen_spiked
from engines.learners import Hyper, LearnerModel, Schedule, SupervisedLearnerState, expgrad_step
from engines.similarity_matching import SMHyper, SimilarityMatchingState
from engines.trainer import train
from oracles.batch import batch_dual_solve, duality_gap, finite_diff_check, ridge_closed_form
from oracles.linalg import orthonormal_basis, pca_subspace, span_residual, subspace_error, symmetric_eig
from utils.helpers import canonical_json


@pytest.fixture(scope="module")
def ridge_instance():
    return gen_regression(5, 50, noise=0.1, seed=42)


@pytest.fixture(scope="module")
def ridge_run(ridge_instance):
    hyper = Hyper(eta=0.1, lam=0.1, lambda_eff=0.1)
    state = SupervisedLearnerState.initial(LearnerModel.RIDGE, ridge_instance.n, hyper)
    return train(state, ridge_instance, 500, schedule=Schedule.inverse_time(0.02),
                 dynamics=DynamicsConfig(step=1.0))


def test_online_ridge_reaches_closed_form(ridge_instance, ridge_run):
    oracle = ridge_closed_form(ridge_instance.X, ridge_instance.y, 0.1)
    w = np.asarray(ridge_run.final_state["w"])
    assert np.linalg.norm(w - oracle) / np.linalg.norm(oracle) < 1e-3
    assert ridge_run.verification["oracle_distance"] < 1e-3
    assert ridge_run.verification["span_residual"] < 1e-8


def test_ridge_strong_and_weak_duality(ridge_instance, rng):
    X, y = ridge_instance.X, ridge_instance.y
    params = DualParams(lam=0.1)
    w_hat = ridge_closed_form(X, y, 0.1)
    z_hat = batch_dual_solve(DualModel.RIDGE, X, y, params).z
    assert abs(duality_gap(DualModel.RIDGE, X, y, w_hat, z_hat, params)) < 1e-6
    for _ in range(1000):
        w, z = rng.normal(size=5), rng.normal(scale=2.0, size=50)
        assert duality_gap(DualModel.RIDGE, X, y, w, z, params) >= -1e-12


def test_duals_equal_prediction_errors(ridge_instance):
    X, y = ridge_instance.X, ridge_instance.y
    params = DualParams(lam=0.1)
    solved = batch_dual_solve(DualModel.RIDGE, X, y, params)
    w_hat = dual_weights(DualModel.RIDGE, solved.z, X, y, params)
    assert np.max(np.abs(solved.z - (y - X.T @ w_hat))) < 1e-6


def test_logistic_fixed_point(rng):
    cfg = DynamicsConfig()
    worst = 0.0
    for _ in range(1000):
        w, x = rng.normal(size=(2, 4))
        u = float(w @ x)
        if abs(u) > 10.0:
            w *= 10.0 / abs(u)
        y = float(rng.choice([-1.0, 1.0]))
        z = relax_logistic(w, x, y, cfg).z
        worst = max(worst, abs(z - expit(-y * float(w @ x))))
    assert worst < 1e-6

    data = gen_classification(3, 40, margin=0.3, seed=5)
    params = DualParams(lam=1.0)
    solved = batch_dual_solve(DualModel.LOGISTIC, data.X, data.y, params)
    w_hat = dual_weights(DualModel.LOGISTIC, solved.z, data.X, data.y, params)
    assert np.max(np.abs(solved.z - expit(-data.y * (data.X.T @ w_hat)))) < 1e-5


def test_svm_updates_stop_once_margins_are_met():
    data = gen_classification(2, 100, margin=0.5, seed=7)
    state = SupervisedLearnerState.initial(LearnerModel.SVM, 2, Hyper(eta=1.0, kappa=0.2))
    report = train(state, data, 300)
    rows = report.epochs[1:]
    quiet = next(k for k, row in enumerate(rows) if row.update_density == 0.0)
    assert all(row.update_density == 0.0 for row in rows[quiet:])
    assert all(row.train_error == 0.0 for row in rows[quiet:])
    assert rows[0].update_density > 0.0


@pytest.fixture(scope="module")
def sm_run():
    data = gen_spiked(10, 2000, 2, 4.0, seed=3)
    hyper = SMHyper(eta_w=0.02, eta_m=0.02, m=2, mode=FixedPointMode.SOLVE)
    state = SimilarityMatchingState.initial(data.n, hyper, seed=3)
    return data, train(state, data, 20, schedule=Schedule.inverse_time(1e-3))


def test_similarity_matching_recovers_principal_subspace(sm_run):
    data, report = sm_run
    W, M = np.asarray(report.final_state["W"]), np.asarray(report.final_state["M"])
    learned = orthonormal_basis(np.linalg.solve(M, W).T)
    assert subspace_error(learned, pca_subspace(data.X, 2).basis) < 0.1
    assert report.final_epoch.subspace_error < 0.1


def test_similarity_matching_plasticity_is_dense(sm_run):
    _, report = sm_run
    assert all(row.update_density == 1.0 for row in report.epochs[1:])


def test_exponentiated_gradient_stays_positive_and_fits():
    data = gen_regression(5, 50, noise=0.0, seed=11, positive_w=True)
    state = SupervisedLearnerState.initial(LearnerModel.EXPGRAD, 5, Hyper(eta=0.03))
    dynamics = DynamicsConfig(step=1.0)

    outcome, stepped = expgrad_step(state, data.sample(0), float(data.y[0]), dynamics=dynamics)
    ratio = stepped.w / state.w
    np.testing.assert_allclose(ratio, np.exp(0.03 * outcome.z * data.sample(0)), rtol=1e-12)

    report = train(state, data, 500, dynamics=dynamics)
    assert all(row.min_weight > 0.0 for row in report.epochs)
    assert report.final_epoch.train_error < 1e-3


def test_l2_weights_stay_in_the_sample_span(rng):
    for _ in range(100):
        n, T = rng.integers(3, 9), rng.integers(1, 3)
        X = rng.normal(size=(n, T))
        w = weights_from_duals(RegularizerModel.l2(float(rng.uniform(0.1, 2.0))), rng.normal(size=T), X)
        assert span_residual(w, X) < 1e-8
    X = np.array([[1.0], [0.0], [0.0]])
    assert span_residual(weights_from_duals(RegularizerModel.entropy(1.0, np.ones(3)), [0.0], X), X) > 0.5


def test_gradients_match_finite_differences(rng):
    points = [-2.3, -0.7, 0.4, 1.8, 3.1]
    for loss, y in ((LossModel.square(), 0.6), (LossModel.hinge_margin(0.5), 1.0),
                    (LossModel.hinge_margin(0.5), -1.0), (LossModel.logistic(), -1.0)):
        error = finite_diff_check(lambda u: float(loss_value(loss, y, u)),
                                  lambda u: float(loss_subgradient(loss, y, u)), points)
        assert error < 1e-5

    barrier_points = np.linspace(0.1, 0.9, 9)
    assert finite_diff_check(lambda z: entropy_barrier(z).value, lambda z: entropy_barrier(z).derivative,
                             barrier_points) < 1e-5

    X, y = rng.normal(size=(3, 6)), rng.normal(size=6)
    params = DualParams(lam=0.5)
    error = finite_diff_check(lambda z: dual_objective(DualModel.RIDGE, z, X, y, params),
                              lambda z: dual_gradient(DualModel.RIDGE, z, X, y, params),
                              [rng.normal(size=6) for _ in range(5)])
    assert error < 1e-5


def test_jacobi_reconstruction(rng):
    for _ in range(100):
        B = rng.normal(size=(10, 10))
        A = 0.5 * (B + B.T)
        result = symmetric_eig(A)
        V = result.vectors
        assert np.linalg.norm(V @ np.diag(result.values) @ V.T - A) < 1e-8
    np.testing.assert_allclose(symmetric_eig(np.array([[2.0, 1.0], [1.0, 2.0]])).values, [3.0, 1.0], atol=1e-10)


def test_runs_are_reproducible(ridge_instance):
    def run():
        state = SupervisedLearnerState.initial(LearnerModel.RIDGE, 5, Hyper(eta=0.05, lambda_eff=0.1))
        report = train(state, ridge_instance, 5, shuffle_seed=9, seed=9)
        return canonical_json(report.to_dict()), report.csv_text()

    assert run() == run()
