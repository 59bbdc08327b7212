"""
Dataset container and its JSON codec.

On disk a dataset is {"meta": {...}, "x": [[n numbers] per sample], "y": [...] | null,
"truth": {...} | null}; samples are stored column by column.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from core.duality import check_binary_labels
from core.errors import DimensionError, DomainError
from utils.helpers import load_json, write_json

logger = logging.getLogger(__name__)


class DatasetKind(Enum):
    REGRESSION = "regression"
    CLASSIFICATION = "classification"
    SPIKED = "spiked"


@dataclass
class DatasetMeta:
    kind: DatasetKind
    n: int
    T: int
    seed: int
    noise: Optional[float] = None
    positive_w: bool = False
    margin: Optional[float] = None
    m: Optional[int] = None
    gap: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "n": self.n,
            "T": self.T,
            "seed": self.seed,
            "noise": self.noise,
            "positive_w": self.positive_w,
            "margin": self.margin,
            "m": self.m,
            "gap": self.gap,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DatasetMeta":
        try:
            kind = DatasetKind(data["kind"])
            return cls(
                kind=kind,
                n=int(data["n"]),
                T=int(data["T"]),
                seed=int(data["seed"]),
                noise=_optional_float(data.get("noise")),
                positive_w=bool(data.get("positive_w", False)),
                margin=_optional_float(data.get("margin")),
                m=None if data.get("m") is None else int(data["m"]),
                gap=_optional_float(data.get("gap")),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise DomainError(f"malformed dataset meta: {e}") from e


@dataclass
class GroundTruth:
    w: Optional[np.ndarray] = None       # planted weights (regression / classification)
    basis: Optional[np.ndarray] = None   # planted n x m principal basis (spiked)
    margin: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "w": None if self.w is None else self.w.tolist(),
            "basis": None if self.basis is None else self.basis.tolist(),
            "margin": self.margin,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GroundTruth":
        w = data.get("w")
        basis = data.get("basis")
        return cls(
            w=None if w is None else np.asarray(w, dtype=float),
            basis=None if basis is None else np.asarray(basis, dtype=float),
            margin=_optional_float(data.get("margin")),
        )


@dataclass
class Dataset:
    X: np.ndarray                    # n x T, columns are samples
    y: Optional[np.ndarray]
    meta: DatasetMeta
    truth: Optional[GroundTruth] = field(default=None)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        if self.X.ndim != 2:
            raise DimensionError(f"X must be an n x T matrix, got shape {self.X.shape}")
        n, T = self.X.shape
        if (n, T) != (self.meta.n, self.meta.T):
            raise DimensionError(f"X is {n} x {T} but meta says {self.meta.n} x {self.meta.T}")
        if self.y is not None:
            self.y = np.asarray(self.y, dtype=float)
            if self.y.shape != (T,):
                raise DimensionError(f"y has shape {self.y.shape}, expected ({T},)")
            if self.meta.kind is DatasetKind.CLASSIFICATION:
                check_binary_labels(self.y)
        if self.truth is not None:
            if self.truth.w is not None and self.truth.w.shape != (n,):
                raise DimensionError(f"truth w has shape {self.truth.w.shape}, expected ({n},)")
            if self.truth.basis is not None and (self.truth.basis.ndim != 2 or self.truth.basis.shape[0] != n):
                raise DimensionError(f"truth basis has shape {self.truth.basis.shape}, expected ({n}, m)")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def T(self) -> int:
        return self.X.shape[1]

    @property
    def has_labels(self) -> bool:
        return self.y is not None

    @property
    def is_classification(self) -> bool:
        return self.meta.kind is DatasetKind.CLASSIFICATION

    def sample(self, t: int) -> np.ndarray:
        return self.X[:, t]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "meta": self.meta.to_dict(),
            "x": self.X.T.tolist(),
            "y": None if self.y is None else self.y.tolist(),
            "truth": None if self.truth is None else self.truth.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Dataset":
        for key in ("meta", "x"):
            if key not in data:
                raise DomainError(f"dataset JSON is missing '{key}'")
        meta = DatasetMeta.from_dict(data["meta"])
        columns = np.asarray(data["x"], dtype=float)
        if columns.size == 0:
            columns = columns.reshape(meta.T, meta.n)
        if columns.ndim != 2:
            raise DimensionError("'x' must be a list of equal-length sample vectors")
        y = data.get("y")
        truth = data.get("truth")
        return cls(
            X=columns.T.copy(),
            y=None if y is None else np.asarray(y, dtype=float),
            meta=meta,
            truth=None if truth is None else GroundTruth.from_dict(truth),
        )

    def save(self, path) -> Path:
        path = write_json(path, self.to_dict())
        logger.debug(f"dataset written to {path}")
        return path

    @classmethod
    def load(cls, path) -> "Dataset":
        return cls.from_dict(load_json(path))


def _optional_float(value) -> Optional[float]:
    return None if value is None else float(value)
