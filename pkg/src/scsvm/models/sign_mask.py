"""SignMask model describing which weights carry sign constraints."""
from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from scsvm.errors import DimensionMismatchError, SignMaskError


def _index_array(indices: Iterable[int]) -> np.ndarray:
    result = np.unique(np.asarray(list(indices), dtype=np.int64))
    result.setflags(write=False)
    return result


@dataclass(frozen=True)
class SignMask:
    """Sign constraints after negation preprocessing.

    Features in the original non-positive set are negated, so every constrained
    weight is non-negative internally: sigma[h] = 1 marks w_h >= 0.
    """

    sigma: np.ndarray  # (d,) in {0, 1}
    pos_idx: np.ndarray  # I_+ after preprocessing (original I_+ and I_-)
    neg_idx: np.ndarray  # original I_- before negation
    negated: np.ndarray  # (d,) in {0, 1}

    def __post_init__(self) -> None:
        sigma = np.asarray(self.sigma, dtype=np.int8).copy()
        negated = np.asarray(self.negated, dtype=np.int8).copy()
        if sigma.shape != negated.shape or sigma.ndim != 1:
            raise DimensionMismatchError("negated", sigma.shape[0], negated.shape[0])
        if not np.all(np.isin(sigma, (0, 1))) or not np.all(np.isin(negated, (0, 1))):
            raise SignMaskError("sigma and negated must be 0/1 vectors")
        pos_idx = _index_array(self.pos_idx)
        neg_idx = _index_array(self.neg_idx)
        if not np.array_equal(np.flatnonzero(sigma), pos_idx):
            raise SignMaskError("sigma does not match the constrained index set")
        if not np.array_equal(np.flatnonzero(negated), neg_idx):
            raise SignMaskError("negation record does not match the original I_- set")
        if np.any(sigma[neg_idx] == 0):
            raise SignMaskError("negated features must be constrained")
        sigma.setflags(write=False)
        negated.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "negated", negated)
        object.__setattr__(self, "pos_idx", pos_idx)
        object.__setattr__(self, "neg_idx", neg_idx)

    @classmethod
    def from_sets(cls, d: int, pos: Iterable[int], neg: Iterable[int]) -> SignMask:
        """Build a mask from the original non-negative and non-positive index sets."""
        pos_set = {int(h) for h in pos}
        neg_set = {int(h) for h in neg}
        overlap = pos_set & neg_set
        if overlap:
            raise SignMaskError(f"features constrained both ways: {sorted(overlap)}")
        out_of_range = [h for h in pos_set | neg_set if h < 0 or h >= d]
        if out_of_range:
            raise SignMaskError(f"feature indices out of range for d={d}: {sorted(out_of_range)}")
        sigma = np.zeros(d, dtype=np.int8)
        negated = np.zeros(d, dtype=np.int8)
        sigma[list(pos_set | neg_set)] = 1
        negated[list(neg_set)] = 1
        return cls(
            sigma=sigma,
            pos_idx=sorted(pos_set | neg_set),
            neg_idx=sorted(neg_set),
            negated=negated,
        )

    @classmethod
    def unconstrained(cls, d: int) -> SignMask:
        """Mask with no sign constraints (standard SVM)."""
        return cls.from_sets(d, (), ())

    @property
    def d(self) -> int:
        """Number of features."""
        return int(self.sigma.shape[0])

    @property
    def free_idx(self) -> np.ndarray:
        """Unconstrained index set I_0."""
        return np.flatnonzero(self.sigma == 0)

    @property
    def original_pos_idx(self) -> np.ndarray:
        """Features constrained non-negative in the user's feature space."""
        return np.flatnonzero((self.sigma == 1) & (self.negated == 0))

    @property
    def flip(self) -> np.ndarray:
        """Per-feature factor turning user-space values into internal ones."""
        return np.where(self.negated == 1, -1.0, 1.0)

    def to_internal(self, features: np.ndarray) -> np.ndarray:
        """Negate the original I_- features of a (n, d) matrix or a d-vector."""
        return np.asarray(features, dtype=np.float64) * self.flip

    def to_user(self, weights: np.ndarray) -> np.ndarray:
        """Undo the negation on an internal weight vector."""
        return np.asarray(weights, dtype=np.float64) * self.flip

    def check_dim(self, d: int) -> None:
        """Raise unless the mask covers exactly d features."""
        if self.d != d:
            raise DimensionMismatchError("sign mask", d, self.d)
