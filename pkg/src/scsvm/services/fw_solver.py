"""Frank-Wolfe solver for the dual of the sign-constrained SVM.

Each iteration maximizes the linearized dual over the box (a closed-form
threshold on the margins), then moves towards that corner with an exact
line search. The duality gap P(w(alpha)) - D(alpha) comes for free from the
margins already computed for the direction step and serves as the
certified stopping rule.
"""
from __future__ import annotations

import logging
import math
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from scsvm.config import SolverName, get_settings
from scsvm.errors import (
    ConfigError,
    DimensionMismatchError,
    InternalInvariantError,
    NonFiniteObjectiveError,
)
from scsvm.models import Dataset, DualState, PrimalModel, SignMask, TraceRecord, TrainingMeta
from scsvm.models.dual_state import project_nonneg
from scsvm.services.line_search import LineSearchInput, exact_line_search
from scsvm.services.objectives import check_box, clamp_gap, gap_terms, margins, recover_weights

logger = logging.getLogger(__name__)

# Slack for the dual monotonicity assertion
MONOTONE_SLACK = 1e-12
# Rounding slack on alpha + eta q before clipping
BOX_SLACK = 1e-12

AlphaInit = Union[str, float, np.ndarray]


@dataclass(frozen=True)
class FwConfig:
    """Frank-Wolfe run parameters.

    alpha0 is "zero", a constant c in [0, 1] applied to every coordinate, or
    an explicit vector in [0, 1]^n.
    """

    lam: float
    epsilon: float = 1e-3
    max_iter: int = 1000
    alpha0: AlphaInit = "zero"
    record_stride: int = 1

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ConfigError(f"lambda must be positive, got {self.lam}")
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iter < 1:
            raise ConfigError(f"max_iter must be at least 1, got {self.max_iter}")
        if self.record_stride < 1:
            raise ConfigError(f"record_stride must be at least 1, got {self.record_stride}")
        if isinstance(self.alpha0, str):
            if self.alpha0 != "zero":
                raise ConfigError(f"unknown alpha0 policy {self.alpha0!r}")
        elif isinstance(self.alpha0, (int, float)):
            if not 0.0 <= float(self.alpha0) <= 1.0:
                raise ConfigError(f"constant alpha0 must lie in [0, 1], got {self.alpha0}")
        else:
            alpha0 = np.asarray(self.alpha0, dtype=np.float64)
            if alpha0.ndim != 1 or np.any(alpha0 < 0.0) or np.any(alpha0 > 1.0):
                raise ConfigError("alpha0 vector must lie in [0, 1]^n")

    def initial_alpha(self, n: int) -> np.ndarray:
        """Materialize alpha^(0) for n examples."""
        if isinstance(self.alpha0, str):
            return np.zeros(n)
        if isinstance(self.alpha0, (int, float)):
            return np.full(n, float(self.alpha0))
        alpha0 = np.asarray(self.alpha0, dtype=np.float64)
        if alpha0.shape != (n,):
            raise DimensionMismatchError("alpha0", n, alpha0.shape[0])
        return alpha0.copy()


@dataclass(frozen=True)
class FwIterate:
    """One Frank-Wolfe step: the LMO corner u, direction q = u - alpha and step eta.

    state is the point reached, alpha + eta * q.
    """

    state: DualState
    u: np.ndarray
    q: np.ndarray
    eta: float


@dataclass
class FwResult:
    """Outcome of fw_train."""

    model: PrimalModel
    state: DualState
    trace: list[TraceRecord] = field(default_factory=list)
    certified: bool = False
    iterations: int = 0
    gap: float = math.inf
    primal: float = math.nan
    dual: float = math.nan


def lmo_from_margins(z: np.ndarray) -> np.ndarray:
    """Corner u with u_i = 1 exactly where the margin z_i is below 1."""
    return (z < 1.0).astype(np.float64)


def lmo(state: DualState, data: Dataset) -> np.ndarray:
    """Maximize <grad D(alpha), u> over the box [0, 1]^n.

    grad_i D = (1 - z_i) / n with z = X^T w(alpha), so the maximizer is the
    0/1 indicator of z_i < 1 (ties at exactly 1 go to 0).
    """
    if state.n != data.n:
        raise DimensionMismatchError("alpha", data.n, state.n)
    return lmo_from_margins(margins(state.w, data))


def fw_iteration_bound(lam: float, R: float, epsilon: float) -> int:
    """Iterations after which D* - D(alpha^(T)) <= epsilon: ceil(2R^2/(lam eps) - 2), at least 0."""
    if lam <= 0 or R <= 0 or epsilon <= 0:
        raise ConfigError("lambda, R and epsilon must be positive")
    return max(0, math.ceil(2.0 * R * R / (lam * epsilon) - 2.0))


def fw_rate_bound(lam: float, R: float, T: int) -> float:
    """Objective error bound 2 C_F / (T + 2) with curvature C_F <= R^2 / lam."""
    return 2.0 * (R * R / lam) / (T + 2)


def fw_step(
    state: DualState,
    u: np.ndarray,
    data: Dataset,
    mask: SignMask,
    lam: float,
) -> FwIterate:
    """Move from state towards the corner u by the exact line-search step."""
    search = LineSearchInput.from_direction(state, u, data, mask, lam)
    eta, _ = exact_line_search(search)
    q = u - state.alpha
    alpha = np.clip(state.alpha + eta * q, 0.0, 1.0)
    v = search.v0 + eta * search.vq
    new_state = DualState(alpha=alpha, v=v, w=project_nonneg(v, mask.sigma))
    return FwIterate(state=new_state, u=u, q=q, eta=float(eta))


def fw_train(
    data: Dataset,
    mask: SignMask,
    cfg: FwConfig,
    callback: Optional[Callable[[int, FwIterate], None]] = None,
) -> FwResult:
    """Run Frank-Wolfe until the duality gap reaches epsilon or max_iter steps.

    Args:
        data: Training data (preprocessed feature space)
        mask: Sign constraints
        cfg: Run parameters
        callback: Called as callback(t, iterate) after step t

    Returns:
        FwResult with the recovered model, final dual state, trace and the
        certification flag (False when the budget ran out first)
    """
    mask.check_dim(data.d)
    settings = get_settings()
    lam, n = cfg.lam, data.n
    alpha0 = cfg.initial_alpha(n)
    check_box(alpha0)
    state = DualState.from_alpha(alpha0, data, mask, lam)

    logger.info(
        "Frank-Wolfe: n=%d d=%d lambda=%.3g epsilon=%.3g max_iter=%d",
        n, data.d, lam, cfg.epsilon, cfg.max_iter,
    )
    trace: list[TraceRecord] = []
    start = time.perf_counter_ns()
    previous_dual: Optional[float] = None
    certified = False
    t = 0
    while True:
        z = margins(state.w, data)
        w_sq = float(state.w @ state.w)
        primal = 0.5 * lam * w_sq + float(np.mean(np.maximum(0.0, 1.0 - z)))
        dual = -0.5 * lam * w_sq + float(np.sum(state.alpha)) / n
        if not (math.isfinite(primal) and math.isfinite(dual)):
            bad = primal if not math.isfinite(primal) else dual
            raise NonFiniteObjectiveError(SolverName.FW.value, t, bad)
        gap = clamp_gap(float(np.mean(gap_terms(state.alpha, z))), primal, dual)

        if settings.debug_checks:
            _assert_invariants(state, data, mask, lam, dual, previous_dual)
        previous_dual = dual

        done = gap <= cfg.epsilon or t >= cfg.max_iter
        if t % cfg.record_stride == 0 or done:
            record = TraceRecord(
                iter=t,
                primal=primal,
                dual=dual,
                gap=gap,
                elapsed_ns=time.perf_counter_ns() - start,
            )
            trace.append(record)
            logger.debug("FW iter %d: P=%.10g D=%.10g gap=%.3e", t, primal, dual, gap)
        if gap <= cfg.epsilon:
            certified = True
            break
        if t >= cfg.max_iter:
            break

        u = lmo_from_margins(z)
        if np.array_equal(u, state.alpha):
            # alpha already sits at the LMO corner, no ascent direction remains
            logger.info("FW: direction vanished at iteration %d with gap %.3e", t, gap)
            if trace[-1].iter != t:
                trace.append(TraceRecord(t, primal, dual, gap, time.perf_counter_ns() - start))
            break
        step = fw_step(state, u, data, mask, lam)
        if settings.debug_checks:
            _assert_step(state, step)
        state = step.state
        t += 1
        if callback is not None:
            callback(t, step)

    logger.info(
        "Frank-Wolfe finished after %d iterations: P=%.10g D=%.10g gap=%.3e certified=%s",
        t, primal, dual, gap, certified,
    )
    meta = TrainingMeta(solver=SolverName.FW, iterations=t, final_gap=gap, certified=certified)
    return FwResult(
        model=recover_weights(state, mask, lam, meta),
        state=state,
        trace=trace,
        certified=certified,
        iterations=t,
        gap=gap,
        primal=primal,
        dual=dual,
    )


def _assert_invariants(
    state: DualState,
    data: Dataset,
    mask: SignMask,
    lam: float,
    dual: float,
    previous_dual: Optional[float],
) -> None:
    if np.any(state.alpha < 0.0) or np.any(state.alpha > 1.0):
        raise InternalInvariantError("alpha left the box")
    if previous_dual is not None and dual < previous_dual - MONOTONE_SLACK * max(1.0, abs(dual)):
        raise InternalInvariantError(f"dual decreased from {previous_dual!r} to {dual!r}")
    if not state.is_consistent(data, mask, lam):
        raise InternalInvariantError("cached v / w(alpha) drifted from alpha")


def _assert_step(previous: DualState, step: FwIterate) -> None:
    if not 0.0 <= step.eta <= 1.0:
        raise InternalInvariantError(f"step {step.eta!r} outside [0, 1]")
    if not np.array_equal(step.q, step.u - previous.alpha):
        raise InternalInvariantError("direction is not u - alpha")
    target = previous.alpha + step.eta * step.q
    if np.any(target < -BOX_SLACK) or np.any(target > 1.0 + BOX_SLACK):
        raise InternalInvariantError("step left the box")
