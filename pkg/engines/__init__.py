"""
Engines package - online learners, the training loop and run verification
"""
from .learners import (
    Hyper,
    LearnerModel,
    Schedule,
    ScheduleKind,
    StepOutcome,
    SupervisedLearnerState,
    expgrad_step,
    hebbian_update,
    logistic_step,
    ridge_step,
    supervised_step,
    svm_step,
)
from .similarity_matching import (
    OjaHyper,
    OjaState,
    SMHyper,
    SimilarityMatchingState,
    oja_step,
    sm_step,
)
from .trainer import CSV_COLUMNS, EpochRecord, RunReport, train
from .verification import (
    SUMMARY_COLUMNS,
    Check,
    CheckStatus,
    Tolerances,
    all_passed,
    flatten_summary_row,
    summary_row,
    summary_sort_key,
    verify_run,
)

__all__ = [
    'Hyper', 'LearnerModel', 'Schedule', 'ScheduleKind', 'StepOutcome', 'SupervisedLearnerState',
    'expgrad_step', 'hebbian_update', 'logistic_step', 'ridge_step', 'supervised_step', 'svm_step',
    'OjaHyper', 'OjaState', 'SMHyper', 'SimilarityMatchingState', 'oja_step', 'sm_step',
    'CSV_COLUMNS', 'EpochRecord', 'RunReport', 'train',
    'SUMMARY_COLUMNS', 'Check', 'CheckStatus', 'Tolerances', 'all_passed', 'flatten_summary_row', 'summary_row',
    'summary_sort_key',
    'verify_run',
]
