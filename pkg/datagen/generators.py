"""
Seeded synthetic datasets.

Every generator draws from numpy's PCG64 bit generator seeded with `seed`
(np.random.Generator(np.random.PCG64(seed))) in a fixed order:

  regression      X ~ N(0,1)^{n x T}; w* ~ N(0,1)^n (|w*| + 0.1 if positive_w);
                  e ~ N(0,1)^T (always drawn); y = X^T w* + noise * e
  classification  w* ~ N(0,1)^n then normalized; X ~ N(0,1)^{n x T};
                  labels: alternating +1/-1 then permuted; each sample's component
                  along w* is replaced by y_t (margin + |s_t|), s_t = w*^T x_t
  spiked          G ~ N(0,1)^{n x m}, basis* = Q of thin QR(G);
                  g ~ N(0,1)^{n x T}; x = (I + (sqrt(gap) - 1) B B^T) g,
                  giving covariance eigenvalues gap (m times) and 1 (n - m times)
"""
import logging

import numpy as np

from core.errors import DomainError
from core.numeric import make_rng
from .dataset import Dataset, DatasetKind, DatasetMeta, GroundTruth

logger = logging.getLogger(__name__)


def _check_size(n: int, T: int) -> None:
    if int(n) < 1 or int(T) < 1:
        raise DomainError(f"need n >= 1 and T >= 1, got n={n}, T={T}")


def gen_regression(n: int, T: int, noise: float = 0.0, seed: int = 0, positive_w: bool = False) -> Dataset:
    _check_size(n, T)
    if not noise >= 0:
        raise DomainError(f"noise must be nonnegative, got {noise}")
    rng = make_rng(seed)
    X = rng.standard_normal((n, T))
    w_star = rng.standard_normal(n)
    if positive_w:
        w_star = np.abs(w_star) + 0.1
    e = rng.standard_normal(T)
    y = X.T @ w_star
    if noise > 0:
        y = y + noise * e

    meta = DatasetMeta(kind=DatasetKind.REGRESSION, n=n, T=T, seed=seed, noise=float(noise), positive_w=positive_w)
    logger.debug(f"regression dataset n={n} T={T} seed={seed} noise={noise}")
    return Dataset(X=X, y=y, meta=meta, truth=GroundTruth(w=w_star))


def gen_classification(n: int, T: int, margin: float = 0.5, seed: int = 0) -> Dataset:
    """Linearly separable labels with y_t w*^T x_t >= margin for every sample."""
    _check_size(n, T)
    if not margin > 0:
        raise DomainError(f"margin must be positive, got {margin}")
    rng = make_rng(seed)
    w_star = rng.standard_normal(n)
    norm = np.linalg.norm(w_star)
    if norm == 0.0:
        w_star = np.eye(n)[0]
    else:
        w_star = w_star / norm
    X = rng.standard_normal((n, T))
    y = rng.permutation(np.where(np.arange(T) % 2 == 0, 1.0, -1.0))

    s = w_star @ X
    target = y * (margin + np.abs(s))
    X = X + np.outer(w_star, target - s)

    meta = DatasetMeta(kind=DatasetKind.CLASSIFICATION, n=n, T=T, seed=seed, margin=float(margin))
    logger.debug(f"classification dataset n={n} T={T} seed={seed} margin={margin}")
    return Dataset(X=X, y=y, meta=meta, truth=GroundTruth(w=w_star, margin=float(margin)))


def gen_spiked(n: int, T: int, m: int, gap: float, seed: int = 0) -> Dataset:
    """Unlabeled samples whose covariance has a planted top-m eigenspace."""
    _check_size(n, T)
    if not 1 <= int(m) < n:
        raise DomainError(f"need 1 <= m < n, got m={m}, n={n}")
    if not gap > 1:
        raise DomainError(f"spike gap must exceed 1, got {gap}")
    rng = make_rng(seed)
    basis, _ = np.linalg.qr(rng.standard_normal((n, m)))
    A = np.eye(n) + (np.sqrt(gap) - 1.0) * basis @ basis.T
    X = A @ rng.standard_normal((n, T))

    meta = DatasetMeta(kind=DatasetKind.SPIKED, n=n, T=T, seed=seed, m=int(m), gap=float(gap))
    logger.debug(f"spiked dataset n={n} T={T} m={m} gap={gap} seed={seed}")
    return Dataset(X=X, y=None, meta=meta, truth=GroundTruth(basis=basis))


def regenerate(meta: DatasetMeta) -> Dataset:
    """Rebuild a dataset from its recorded meta."""
    if meta.kind is DatasetKind.REGRESSION:
        return gen_regression(meta.n, meta.T, meta.noise or 0.0, meta.seed, meta.positive_w)
    if meta.kind is DatasetKind.CLASSIFICATION:
        return gen_classification(meta.n, meta.T, meta.margin, meta.seed)
    return gen_spiked(meta.n, meta.T, meta.m, meta.gap, meta.seed)
