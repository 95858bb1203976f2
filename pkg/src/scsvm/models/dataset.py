"""Dataset models: raw examples, the signed training matrix and similarity matrices."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from scsvm.errors import DimensionMismatchError, SingleClassError

# Tolerance for the stored-column and feature-norm checks
COLUMN_ATOL = 1e-12


def _frozen(array: np.ndarray, dtype: type = np.float64) -> np.ndarray:
    """Return a read-only contiguous copy of an array."""
    result = np.array(array, dtype=dtype, copy=True)
    result.setflags(write=False)
    return result


def _check_labels(labels: np.ndarray) -> None:
    if not np.all(np.isin(labels, (-1, 1))):
        bad = labels[~np.isin(labels, (-1, 1))][0]
        raise ValueError(f"labels must be -1 or +1, got {bad}")


@dataclass(frozen=True)
class RawDataset:
    """Examples as loaded from disk: one feature row and one label per example."""

    features: np.ndarray  # (n, d)
    labels: np.ndarray  # (n,) in {-1, +1}

    def __post_init__(self) -> None:
        features = _frozen(self.features)
        labels = _frozen(self.labels, np.int64)
        if features.ndim != 2:
            raise ValueError("features must be a 2-D array")
        if labels.shape != (features.shape[0],):
            raise DimensionMismatchError("labels", features.shape[0], labels.shape[0])
        _check_labels(labels)
        if not np.all(np.isfinite(features)):
            raise ValueError("features must be finite")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        """Number of examples."""
        return int(self.features.shape[0])

    @property
    def d(self) -> int:
        """Number of features."""
        return int(self.features.shape[1])

    def subset(self, index: np.ndarray) -> RawDataset:
        """Select examples by index, keeping their order."""
        return RawDataset(features=self.features[index], labels=self.labels[index])


@dataclass(frozen=True)
class Dataset:
    """Training matrix with column i storing labels[i] * x_i.

    Features are already sign-preprocessed (non-positive constraints turned
    into non-negative ones), so the matrix is what both solvers consume.
    """

    cols: np.ndarray  # (d, n)
    labels: np.ndarray  # (n,)
    R: float = field(default=-1.0)
    source_index: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        cols = _frozen(self.cols)
        labels = _frozen(self.labels, np.int64)
        if cols.ndim != 2 or cols.shape[0] < 1 or cols.shape[1] < 1:
            raise ValueError("cols must be a (d, n) array with n >= 1 and d >= 1")
        if labels.shape != (cols.shape[1],):
            raise DimensionMismatchError("labels", cols.shape[1], labels.shape[0])
        _check_labels(labels)
        if not np.all(np.isfinite(cols)):
            raise ValueError("dataset entries must be finite")
        norms = np.linalg.norm(cols, axis=0)
        max_norm = float(norms.max())
        radius = max_norm if self.R < 0 else float(self.R)
        if radius + COLUMN_ATOL * max(1.0, radius) < max_norm:
            raise ValueError(f"R={radius} is smaller than the largest feature norm {max_norm}")
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "R", radius)
        if self.source_index is not None:
            source = _frozen(self.source_index, np.int64)
            if source.shape != labels.shape:
                raise DimensionMismatchError("source_index", labels.shape[0], source.shape[0])
            object.__setattr__(self, "source_index", source)

    @classmethod
    def from_features(
        cls,
        features: np.ndarray,
        labels: np.ndarray,
        source_index: Optional[np.ndarray] = None,
    ) -> Dataset:
        """Build the signed column matrix from (n, d) features and labels."""
        features = np.asarray(features, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.int64)
        if features.ndim != 2 or labels.shape != (features.shape[0],):
            raise DimensionMismatchError("labels", features.shape[0], labels.shape[0])
        cols = (features * labels[:, None]).T
        data = cls(cols=cols, labels=labels, source_index=source_index)
        if not np.allclose(data.features(), features, rtol=0.0, atol=COLUMN_ATOL):
            raise ValueError("stored columns do not reproduce the feature rows")
        return data

    @property
    def n(self) -> int:
        """Number of examples."""
        return int(self.cols.shape[1])

    @property
    def d(self) -> int:
        """Number of features."""
        return int(self.cols.shape[0])

    def features(self) -> np.ndarray:
        """Preprocessed feature rows, shape (n, d)."""
        return (self.cols * self.labels[None, :]).T

    def feature_norms(self) -> np.ndarray:
        """Euclidean norm of every example."""
        return np.linalg.norm(self.cols, axis=0)

    def check_radius(self) -> bool:
        """Recompute norms and confirm R bounds all of them."""
        return bool(np.all(self.feature_norms() <= self.R * (1.0 + COLUMN_ATOL) + COLUMN_ATOL))

    def class_counts(self) -> tuple[int, int]:
        """Return (n_pos, n_neg)."""
        n_pos = int(np.sum(self.labels == 1))
        return n_pos, self.n - n_pos

    def require_both_classes(self) -> None:
        """Raise SingleClassError unless both labels occur."""
        n_pos, n_neg = self.class_counts()
        if n_pos == 0 or n_neg == 0:
            raise SingleClassError(f"need both classes, got {n_pos} positive and {n_neg} negative")

    def subset(self, index: np.ndarray) -> Dataset:
        """Select examples by index, keeping the feature space."""
        index = np.asarray(index, dtype=np.int64)
        source = None if self.source_index is None else self.source_index[index]
        return Dataset(cols=self.cols[:, index], labels=self.labels[index], source_index=source)

    def fingerprint(self) -> str:
        """SHA-256 over shape, labels and stored columns."""
        digest = hashlib.sha256()
        digest.update(f"{self.d}x{self.n}".encode())
        digest.update(np.ascontiguousarray(self.labels).tobytes())
        digest.update(np.ascontiguousarray(self.cols).tobytes())
        return digest.hexdigest()


@dataclass(frozen=True)
class SimilarityMatrix:
    """Pairwise sequence similarities with one label per sequence."""

    values: np.ndarray  # (n, n)
    labels: np.ndarray  # (n,)

    def __post_init__(self) -> None:
        values = _frozen(self.values)
        labels = _frozen(self.labels, np.int64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"similarity matrix must be square, got shape {values.shape}")
        if labels.shape != (values.shape[0],):
            raise DimensionMismatchError("labels", values.shape[0], labels.shape[0])
        _check_labels(labels)
        if not np.all(np.isfinite(values)):
            raise ValueError("similarity entries must be finite")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        """Number of sequences."""
        return int(self.values.shape[0])
