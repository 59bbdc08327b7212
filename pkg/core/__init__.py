"""
Duality core, neural dynamics, numerics, errors and run logging
"""

from .errors import (
    ConvergenceError,
    DimensionError,
    DomainError,
    DualityError,
    LabelError,
    NumericalError,
    OrthonormalityError,
    StabilityError,
    StepSizeError,
    TrainingError,
)
from .duality import (
    BarrierValue,
    DualModel,
    DualParams,
    LossKind,
    LossModel,
    PrimalDualPoint,
    RegularizerKind,
    RegularizerModel,
    check_binary_labels,
    dual_gradient,
    dual_objective,
    dual_optimal_z,
    dual_weights,
    entropy_barrier,
    loss_subgradient,
    loss_value,
    margin_penalty,
    model_primal_objective,
    primal_objective,
    reg_conjugate,
    reg_conjugate_gradient,
    reg_value,
    sigmoid,
    similarity_matching_objective,
    square_conjugate,
    weights_from_duals,
)
from .dynamics import (
    DynamicsConfig,
    FixedPoint,
    FixedPointMode,
    check_lateral_stability,
    check_relaxation_step,
    lateral_spectrum,
    logistic_field,
    relax,
    relax_logistic,
    relax_ridge,
    relax_similarity,
    ridge_field,
    sm_field,
    svm_activation,
    svm_relax,
)
from .logger import RunLogger, setup_logging
from .numeric import EigResult, make_rng, min_eigenvalue, symmetric_eig

__all__ = [
    'ConvergenceError', 'DimensionError', 'DomainError', 'DualityError', 'LabelError',
    'NumericalError', 'OrthonormalityError', 'StabilityError', 'StepSizeError', 'TrainingError',
    'BarrierValue', 'DualModel', 'DualParams', 'LossKind', 'LossModel', 'PrimalDualPoint',
    'RegularizerKind', 'RegularizerModel', 'check_binary_labels', 'dual_gradient',
    'dual_objective', 'dual_optimal_z', 'dual_weights', 'entropy_barrier', 'loss_subgradient',
    'loss_value', 'margin_penalty', 'model_primal_objective', 'primal_objective',
    'reg_conjugate', 'reg_conjugate_gradient', 'reg_value', 'sigmoid',
    'similarity_matching_objective', 'square_conjugate', 'weights_from_duals',
    'DynamicsConfig', 'FixedPoint', 'FixedPointMode', 'check_lateral_stability', 'check_relaxation_step',
    'lateral_spectrum',
    'logistic_field', 'relax', 'relax_logistic', 'relax_ridge', 'relax_similarity',
    'ridge_field', 'sm_field', 'svm_activation', 'svm_relax',
    'RunLogger', 'setup_logging',
    'EigResult', 'make_rng', 'min_eigenvalue', 'symmetric_eig',
]
