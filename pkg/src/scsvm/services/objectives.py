"""Primal and dual objectives, projections and the duality gap.

The primal problem is

    P(w) = (lambda / 2) ||w||^2 + (1/n) sum_i max(0, 1 - <col_i, w>)

over the cone S = {w : sigma * w >= 0}, where col_i = y_i x_i. Its dual is

    D(alpha) = -(lambda / 2) ||w(alpha)||^2 + (1/n) <1, alpha>,
    w(alpha) = Pi_S(X alpha / (lambda n)),  alpha in [0, 1]^n.

Every alpha in the box certifies P(w(alpha)) - P(w*) <= P(w(alpha)) - D(alpha).
"""
import logging

import numpy as np

from scsvm.config import get_settings
from scsvm.errors import DimensionMismatchError, DualInfeasibleError, NegativeGapError
from scsvm.models import Dataset, DualState, PrimalModel, SignMask, TrainingMeta
from scsvm.models.dual_state import BOX_ATOL, project_nonneg

logger = logging.getLogger(__name__)


def _check_weights(w: np.ndarray, data: Dataset) -> None:
    if w.shape != (data.d,):
        raise DimensionMismatchError("weights", data.d, w.shape[0] if w.ndim else 0)


def margins(w: np.ndarray, data: Dataset) -> np.ndarray:
    """Compute z_i = <col_i, w> = y_i <x_i, w> for every example."""
    w = np.asarray(w, dtype=np.float64)
    _check_weights(w, data)
    return data.cols.T @ w


def primal_value(w: np.ndarray, data: Dataset, lam: float) -> float:
    """Evaluate P(w) for a raw weight vector."""
    z = margins(w, data)
    return float(0.5 * lam * (w @ w) + np.mean(np.maximum(0.0, 1.0 - z)))


def primal_objective(model: PrimalModel, data: Dataset) -> float:
    """Evaluate P at the model's internal weights.

    Args:
        model: Trained or candidate model
        data: Dataset in the same (preprocessed) feature space

    Returns:
        (lambda/2)||w||^2 + mean hinge loss
    """
    return primal_value(model.w, data, model.lam)


def subgradient_value(w: np.ndarray, data: Dataset, lam: float) -> np.ndarray:
    """Subgradient of P at a raw weight vector (margin exactly 1 contributes 0)."""
    z = margins(w, data)
    violators = (z < 1.0).astype(np.float64)
    return lam * np.asarray(w, dtype=np.float64) - data.cols @ violators / data.n


def primal_subgradient(model: PrimalModel, data: Dataset) -> np.ndarray:
    """Pegasos subgradient lambda w - (1/n) sum over margin violators of col_i."""
    return subgradient_value(model.w, data, model.lam)


def project_sign_cone(v: np.ndarray, mask: SignMask) -> np.ndarray:
    """Euclidean projection onto S: v + max(0, -sigma * v)."""
    v = np.asarray(v, dtype=np.float64)
    mask.check_dim(v.shape[0])
    return project_nonneg(v, mask.sigma)


def project_ball(v: np.ndarray, lam: float) -> np.ndarray:
    """Euclidean projection onto the ball of radius sqrt(2 / lambda)."""
    v = np.asarray(v, dtype=np.float64)
    radius = np.sqrt(2.0 / lam)
    norm = float(np.linalg.norm(v))
    if norm <= radius:
        return v.copy()
    return v * (radius / norm)


def check_box(alpha: np.ndarray) -> None:
    """Raise DualInfeasibleError if alpha leaves [0, 1]^n."""
    if np.any(alpha < -BOX_ATOL) or np.any(alpha > 1.0 + BOX_ATOL):
        raise DualInfeasibleError("alpha must lie in [0, 1]^n")


def dual_objective(state: DualState, data: Dataset, lam: float) -> float:
    """Evaluate D(alpha) from the cached w(alpha)."""
    check_box(state.alpha)
    if state.n != data.n:
        raise DimensionMismatchError("alpha", data.n, state.n)
    _check_weights(state.w, data)
    return float(-0.5 * lam * (state.w @ state.w) + np.sum(state.alpha) / data.n)


def gap_terms(alpha: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Per-example contributions max(0, 1 - z_i) - alpha_i (1 - z_i) to n * gap.

    Valid because <w(alpha), v> = ||w(alpha)||^2 for a projection onto a cone.
    """
    return np.maximum(0.0, 1.0 - z) - alpha * (1.0 - z)


def clamp_gap(gap: float, primal: float, dual: float) -> float:
    """Apply the numerical floor to a duality gap value."""
    floor = get_settings().gap_floor * max(1.0, abs(primal), abs(dual))
    if gap >= 0.0:
        return gap
    if gap >= -floor:
        logger.debug("Clamping duality gap %.3e to zero", gap)
        return 0.0
    raise NegativeGapError(gap)


def duality_gap(state: DualState, data: Dataset, lam: float) -> float:
    """P(w(alpha)) - D(alpha), clamped at the numerical floor.

    Args:
        state: Dual point with consistent caches
        data: Training data
        lam: Regularization parameter

    Returns:
        Non-negative gap; a gap <= eps certifies an eps-accurate w(alpha)
    """
    dual = dual_objective(state, data, lam)
    primal = primal_value(state.w, data, lam)
    return clamp_gap(primal - dual, primal, dual)


def recover_weights(
    state: DualState,
    mask: SignMask,
    lam: float,
    meta: TrainingMeta | None = None,
) -> PrimalModel:
    """Primal model w(alpha); its `weights` report the original signs."""
    return PrimalModel(
        w=project_nonneg(state.v, mask.sigma),
        lam=lam,
        sign_mask=mask,
        meta=meta or TrainingMeta(),
    )
