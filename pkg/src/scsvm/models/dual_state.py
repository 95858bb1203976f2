"""DualState model holding alpha and its cached primal image."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from scsvm.errors import DimensionMismatchError, DualInfeasibleError
from scsvm.models.dataset import Dataset
from scsvm.models.sign_mask import SignMask

# Slack for box membership after floating-point updates
BOX_ATOL = 1e-12


def project_nonneg(v: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Clip the constrained coordinates of v at zero."""
    return np.where(sigma == 1, np.maximum(v, 0.0), v)


@dataclass(frozen=True)
class DualState:
    """Dual point alpha in [0, 1]^n with v = X alpha / (lambda n) and w = Pi_S(v)."""

    alpha: np.ndarray
    v: np.ndarray
    w: np.ndarray

    def __post_init__(self) -> None:
        alpha = np.array(self.alpha, dtype=np.float64, copy=True)
        if np.any(alpha < -BOX_ATOL) or np.any(alpha > 1.0 + BOX_ATOL):
            raise DualInfeasibleError("alpha must lie in [0, 1]^n")
        alpha = np.clip(alpha, 0.0, 1.0)
        v = np.array(self.v, dtype=np.float64, copy=True)
        w = np.array(self.w, dtype=np.float64, copy=True)
        if v.shape != w.shape:
            raise DimensionMismatchError("w", v.shape[0], w.shape[0])
        for array in (alpha, v, w):
            array.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "w", w)

    @classmethod
    def from_alpha(
        cls,
        alpha: np.ndarray,
        data: Dataset,
        mask: SignMask,
        lam: float,
    ) -> DualState:
        """Compute the caches for alpha from scratch."""
        alpha = np.asarray(alpha, dtype=np.float64)
        if alpha.shape != (data.n,):
            raise DimensionMismatchError("alpha", data.n, alpha.shape[0] if alpha.ndim else 0)
        mask.check_dim(data.d)
        v = data.cols @ alpha / (lam * data.n)
        return cls(alpha=alpha, v=v, w=project_nonneg(v, mask.sigma))

    @classmethod
    def zero(cls, data: Dataset, mask: SignMask, lam: float) -> DualState:
        """The all-zero dual point (w(alpha) = 0)."""
        return cls.from_alpha(np.zeros(data.n), data, mask, lam)

    @property
    def n(self) -> int:
        """Number of dual variables."""
        return int(self.alpha.shape[0])

    def is_consistent(
        self,
        data: Dataset,
        mask: SignMask,
        lam: float,
        atol: float = 1e-9,
    ) -> bool:
        """Recompute the caches and compare them with the stored ones."""
        fresh = DualState.from_alpha(self.alpha, data, mask, lam)
        scale = max(1.0, float(np.abs(fresh.v).max(initial=0.0)))
        return bool(
            np.allclose(fresh.v, self.v, rtol=0.0, atol=atol * scale)
            and np.allclose(fresh.w, self.w, rtol=0.0, atol=atol * scale)
        )
