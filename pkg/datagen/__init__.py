"""
Seeded synthetic datasets with embedded ground truth
"""
from .dataset import Dataset, DatasetKind, DatasetMeta, GroundTruth
from .generators import gen_classification, gen_regression, gen_spiked, make_rng, regenerate

__all__ = [
    'Dataset',
    'DatasetKind',
    'DatasetMeta',
    'GroundTruth',
    'gen_classification',
    'gen_regression',
    'gen_spiked',
    'make_rng',
    'regenerate',
]
