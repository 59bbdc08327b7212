"""
Losses, conjugates and primal/dual objectives.
"""
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from core.duality import (
    DualModel,
    DualParams,
    LossModel,
    PrimalDualPoint,
    RegularizerModel,
    dual_gradient,
    dual_objective,
    dual_optimal_z,
    entropy_barrier,
    loss_subgradient,
    loss_value,
    margin_penalty,
    primal_objective,
    reg_conjugate,
    reg_conjugate_gradient,
    reg_value,
    similarity_matching_objective,
    square_conjugate,
    weights_from_duals,
)
from core.errors import DimensionError, DomainError, LabelError
from oracles.batch import duality_gap, finite_diff_check
from oracles.linalg import span_residual

LOSSES = [LossModel.square(), LossModel.hinge_margin(), LossModel.logistic()]


class TestLosses:

    def test_loss_values(self):
        assert loss_value(LossModel.square(), 1.0, 0.0) == 0.5
        assert loss_value(LossModel.hinge_margin(), 1.0, 2.0) == 0.0
        assert loss_value(LossModel.logistic(), 1.0, 0.0) == pytest.approx(0.693147180559945, abs=1e-12)

    def test_logistic_loss_does_not_overflow(self):
        assert loss_value(LossModel.logistic(), 1.0, -1000.0) == pytest.approx(1000.0)
        assert loss_value(LossModel.logistic(), 1.0, 1000.0) == pytest.approx(0.0, abs=1e-300)

    def test_losses_are_nonnegative(self, rng):
        u = rng.normal(scale=5.0, size=200)
        y = rng.choice([-1.0, 1.0], size=200)
        for loss in LOSSES:
            assert np.all(loss_value(loss, y, u) >= 0.0)

    def test_subgradients(self):
        assert loss_subgradient(LossModel.square(), 2.0, 0.5) == -1.5
        assert loss_subgradient(LossModel.hinge_margin(), 1.0, 2.0) == 0.0
        assert loss_subgradient(LossModel.hinge_margin(), 1.0, 1.0) == 0.0   # kink
        assert loss_subgradient(LossModel.logistic(), 1.0, 0.0) == -0.5

    def test_dual_optimal_z(self):
        assert dual_optimal_z(LossModel.square(), 2.0, 0.5) == 1.5
        assert dual_optimal_z(LossModel.square(), 0.7, 0.7) == 0.0
        assert dual_optimal_z(LossModel.logistic(), 1.0, 0.0) == 0.5

    def test_dual_optimal_z_is_negated_subgradient(self, rng):
        u = rng.normal(scale=3.0, size=100)
        y = rng.choice([-1.0, 1.0], size=100)
        for loss in LOSSES:
            assert_array_equal(dual_optimal_z(loss, y, u), -np.asarray(loss_subgradient(loss, y, u)))

    def test_subgradient_matches_finite_differences(self, rng):
        for loss in LOSSES:
            y = 1.0 if loss.is_classification else 0.3
            points = rng.uniform(-4.0, 4.0, size=1000)
            points = points[np.abs(points - 1.0) > 1e-3]   # away from the hinge kink
            error = finite_diff_check(lambda u: loss_value(loss, y, u), lambda u: loss_subgradient(loss, y, u), points)
            assert error < 1e-5

    def test_classification_losses_reject_bad_labels(self):
        with pytest.raises(LabelError):
            loss_value(LossModel.hinge_margin(), 0.5, 0.0)
        with pytest.raises(LabelError):
            loss_subgradient(LossModel.logistic(), np.array([1.0, 0.0]), np.zeros(2))

    def test_hinge_needs_positive_kappa(self):
        with pytest.raises(DomainError):
            LossModel.hinge_margin(0.0)

    def test_margin_penalty(self):
        assert margin_penalty(2.0, 1.0, 0.0) == 0.25
        assert margin_penalty(1.0, -1.0, -3.0) == 0.0


class TestConjugates:

    def test_square_conjugate(self):
        assert square_conjugate(1.0, 2.0) == 4.0
        assert square_conjugate(0.0, 0.0) == 0.0
        assert square_conjugate(-1.0, 1.0) == -0.5

    def test_square_conjugate_matches_grid_supremum(self):
        u = np.arange(-100.0, 100.0, 1e-3)
        for y, v in [(1.0, 2.0), (-1.0, 1.0), (0.5, -0.3)]:
            grid = np.max(u * v - 0.5 * (y - u) ** 2)
            assert square_conjugate(y, v) == pytest.approx(grid, abs=1e-6)

    def test_fenchel_young_for_square_loss(self, rng):
        z_grid = np.linspace(-20.0, 20.0, 4001)
        for y, u in rng.normal(size=(50, 2)):
            best = (y - u) * (y - u) - 0.5 * (y - u) ** 2
            assert best == pytest.approx(0.5 * (y - u) ** 2, abs=1e-9)
            assert np.max(z_grid * (y - u) - 0.5 * z_grid ** 2) <= best + 1e-12

    def test_entropy_barrier(self):
        value, derivative = entropy_barrier(0.5)
        assert value == pytest.approx(math.log(2.0), abs=1e-12)
        assert derivative == pytest.approx(0.0, abs=1e-15)
        assert entropy_barrier(0.25).derivative == pytest.approx(math.log(3.0), abs=1e-12)

    def test_entropy_barrier_boundary(self):
        low = entropy_barrier(0.0)
        high = entropy_barrier(1.0)
        assert low.value == 0.0 and high.value == 0.0
        assert low.derivative == math.inf and high.derivative == -math.inf
        assert low.at_boundary and high.at_boundary
        assert not entropy_barrier(0.3).at_boundary
        assert entropy_barrier(1e-300).value == pytest.approx(0.0, abs=1e-290)

    def test_entropy_barrier_domain(self):
        with pytest.raises(DomainError):
            entropy_barrier(1.5)
        with pytest.raises(DomainError):
            entropy_barrier(-0.1)

    def test_barrier_derivative_matches_finite_differences(self):
        points = np.linspace(0.1, 0.9, 33)
        error = finite_diff_check(lambda z: entropy_barrier(z).value, lambda z: entropy_barrier(z).derivative, points)
        assert error < 1e-5

    def test_regularizer_conjugate_gradient(self):
        assert_array_equal(reg_conjugate_gradient(RegularizerModel.l2(1.0), [1.0, -2.0]), [1.0, -2.0])
        entropy = RegularizerModel.entropy(1.0, [1.0, 1.0])
        assert_allclose(reg_conjugate_gradient(entropy, [1.0, 1.0]), [1.0, 1.0])
        single = RegularizerModel.entropy(1.0, [2.0])
        assert_allclose(reg_conjugate_gradient(single, [0.0]), [2.0 / math.e], rtol=1e-12)

    def test_entropy_conjugate_gradient_is_positive(self, rng):
        reg = RegularizerModel.entropy(1.0, rng.uniform(0.1, 3.0, size=4))
        for v in rng.normal(scale=20.0, size=(50, 4)):
            assert np.all(reg_conjugate_gradient(reg, v) > 0.0)

    def test_entropy_conjugate_matches_its_gradient(self, rng):
        reg = RegularizerModel.entropy(1.0, [0.5, 2.0, 1.0])
        points = rng.normal(size=(10, 3))
        error = finite_diff_check(lambda v: reg_conjugate(reg, v), lambda v: reg_conjugate_gradient(reg, v), points)
        assert error < 1e-5

    def test_regularizer_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            reg_conjugate_gradient(RegularizerModel.entropy(1.0, [1.0, 1.0]), [1.0, 2.0, 3.0])

    def test_regularizer_parameters_validated(self):
        with pytest.raises(DomainError):
            RegularizerModel.l2(0.0)
        with pytest.raises(DomainError):
            RegularizerModel.entropy(1.0, [1.0, -1.0])

    def test_entropy_value_uses_zero_log_zero(self):
        reg = RegularizerModel.entropy(1.0, [1.0, 1.0])
        assert reg_value(reg, [0.0, 1.0]) == 0.0
        with pytest.raises(DomainError) as info:
            reg_value(reg, [1.0, -0.5])
        assert info.value.index == 1


class TestWeightsFromDuals:

    def test_zero_duals(self):
        X = np.arange(6.0).reshape(2, 3)
        assert_array_equal(weights_from_duals(RegularizerModel.l2(1.0), np.zeros(3), X), np.zeros(2))

    def test_single_sample(self):
        X = np.array([[1.0], [0.0]])
        assert_allclose(weights_from_duals(RegularizerModel.l2(1.0), [2.0], X, lam=1.0), [2.0, 0.0])

    def test_entropy_zero_duals_give_scaled_prior(self):
        X = np.array([[1.0], [0.0]])
        w = weights_from_duals(RegularizerModel.entropy(1.0, [1.0, 1.0]), [0.0], X)
        assert_allclose(w, [math.exp(-1.0), math.exp(-1.0)])

    def test_errors(self):
        X = np.ones((2, 3))
        with pytest.raises(DimensionError):
            weights_from_duals(RegularizerModel.l2(1.0), np.zeros(2), X)
        with pytest.raises(DomainError):
            weights_from_duals(RegularizerModel.l2(1.0), np.zeros(3), X, lam=-1.0)

    def test_l2_weights_lie_in_span(self, rng):
        for _ in range(20):
            X = rng.normal(size=(6, 3))
            w = weights_from_duals(RegularizerModel.l2(0.5), rng.normal(size=3), X)
            assert span_residual(w, X) < 1e-10


class TestObjectives:

    def test_primal_objective(self):
        square, l2 = LossModel.square(), RegularizerModel.l2(1.0)
        X = np.array([[1.0, -2.0]])
        assert primal_objective(square, l2, [0.0], X, [0.0, 0.0]) == 0.0
        assert primal_objective(square, l2, [0.0], X, [1.0, 1.0]) == 0.5
        assert primal_objective(square, RegularizerModel.l2(2.0), [1.0], np.array([[1.0]]), [1.0]) == 1.0

    def test_primal_objective_entropy_domain(self):
        reg = RegularizerModel.entropy(1.0, [1.0])
        with pytest.raises(DomainError):
            primal_objective(LossModel.square(), reg, [-1.0], np.array([[1.0]]), [1.0])

    def test_dual_objective_examples(self):
        X = np.array([[1.0, 2.0]])
        y = np.array([1.0, -1.0])
        assert dual_objective(DualModel.RIDGE, np.zeros(2), X, y) == 0.0
        assert dual_objective(DualModel.SVM, np.zeros(2), X, y) == 0.0
        assert dual_objective(DualModel.RIDGE, [1.0], np.array([[1.0]]), [1.0]) == 0.0

    def test_dual_constraints_name_the_index(self):
        X = np.ones((1, 3))
        y = np.array([1.0, -1.0, 1.0])
        with pytest.raises(DomainError) as info:
            dual_objective(DualModel.SVM, [0.5, 0.0, -0.1], X, y)
        assert info.value.index == 2
        with pytest.raises(DomainError) as info:
            dual_objective(DualModel.LOGISTIC, [0.5, 1.5, 0.5], X, y)
        assert info.value.index == 1

    def test_dual_rejects_regression_labels_for_classifiers(self):
        with pytest.raises(LabelError):
            dual_objective(DualModel.SVM, np.zeros(2), np.ones((1, 2)), [0.3, 1.0])

    def test_ridge_dual_is_concave(self, rng):
        X = rng.normal(size=(4, 10))
        y = rng.normal(size=10)
        for _ in range(100):
            z1, z2 = rng.normal(scale=3.0, size=(2, 10))
            mid = dual_objective(DualModel.RIDGE, 0.5 * (z1 + z2), X, y)
            ends = 0.5 * (dual_objective(DualModel.RIDGE, z1, X, y) + dual_objective(DualModel.RIDGE, z2, X, y))
            assert mid >= ends - 1e-12

    def test_dual_gradient_matches_finite_differences(self, rng):
        X = rng.normal(size=(3, 8))
        y = rng.normal(size=8)
        params = DualParams(lam=0.7)
        points = rng.normal(size=(5, 8))
        error = finite_diff_check(
            lambda z: dual_objective(DualModel.RIDGE, z, X, y, params),
            lambda z: dual_gradient(DualModel.RIDGE, z, X, y, params),
            points,
        )
        assert error < 1e-5

    def test_weak_duality_on_random_pairs(self, rng):
        n, T = 3, 12
        X = rng.normal(size=(n, T))
        y_reg = rng.normal(size=T)
        y_cls = rng.choice([-1.0, 1.0], size=T)
        params = DualParams(lam=0.5, kappa=0.8, mu=np.ones(n))
        for _ in range(1000):
            w = rng.normal(size=n)
            assert duality_gap(DualModel.RIDGE, X, y_reg, w, rng.normal(size=T), params) >= -1e-12
            assert duality_gap(DualModel.SVM, X, y_cls, w, rng.exponential(size=T), params) >= -1e-12
            assert duality_gap(DualModel.LOGISTIC, X, y_cls, w, rng.uniform(size=T), params) >= -1e-12
            assert duality_gap(DualModel.EXPGRAD, X, y_reg, np.abs(w) + 1e-3, rng.normal(size=T), params) >= -1e-12

    def test_similarity_matching_objective(self, rng):
        X = rng.normal(size=(4, 20))
        Z = rng.normal(size=(2, 20))
        gram_x, gram_z = X.T @ X, Z.T @ Z
        expected = (-2.0 * np.trace(gram_x @ gram_z) + np.sum(gram_z ** 2)) / 20 ** 2
        assert similarity_matching_objective(X, Z) == pytest.approx(expected, rel=1e-10)

    def test_primal_dual_point_shapes(self):
        X = np.ones((2, 3))
        PrimalDualPoint(np.zeros(2), np.zeros(3)).check(X)
        with pytest.raises(DimensionError):
            PrimalDualPoint(np.zeros(3), np.zeros(3)).check(X)
