"""PrimalModel: a trained weight vector together with its constraints."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from scsvm.config import SolverName
from scsvm.errors import DimensionMismatchError
from scsvm.models.sign_mask import SignMask


@dataclass(frozen=True)
class TrainingMeta:
    """How a model was produced."""

    solver: Optional[SolverName] = None
    iterations: int = 0
    final_gap: Optional[float] = None
    certified: Optional[bool] = None


@dataclass(frozen=True)
class PrimalModel:
    """Internal weights w (sigma * w >= 0) with lambda and the sign mask."""

    w: np.ndarray
    lam: float
    sign_mask: SignMask
    meta: TrainingMeta = field(default_factory=TrainingMeta)

    def __post_init__(self) -> None:
        w = np.array(self.w, dtype=np.float64, copy=True)
        if w.ndim != 1:
            raise ValueError("w must be a vector")
        self.sign_mask.check_dim(w.shape[0])
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def d(self) -> int:
        """Number of features."""
        return int(self.w.shape[0])

    @property
    def radius(self) -> float:
        """Radius sqrt(2 / lambda) of the ball holding the optimum."""
        return float(np.sqrt(2.0 / self.lam))

    @property
    def weights(self) -> np.ndarray:
        """User-space weights with the feature negation undone."""
        return self.sign_mask.to_user(self.w)

    def is_feasible(self) -> bool:
        """True when every constrained weight is non-negative."""
        return bool(np.all(self.sign_mask.sigma * self.w >= 0.0))

    def decision_function(self, raw_features: np.ndarray) -> np.ndarray:
        """Scores <weights, x> for raw (user-space) feature rows."""
        raw_features = np.asarray(raw_features, dtype=np.float64)
        if raw_features.shape[-1] != self.d:
            raise DimensionMismatchError("features", self.d, raw_features.shape[-1])
        return raw_features @ self.weights

    def internal_scores(self, features: np.ndarray) -> np.ndarray:
        """Scores <w, x> for preprocessed feature rows."""
        features = np.asarray(features, dtype=np.float64)
        if features.shape[-1] != self.d:
            raise DimensionMismatchError("features", self.d, features.shape[-1])
        return features @ self.w
