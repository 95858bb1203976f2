"""Projected-gradient (sign-constrained Pegasos) solver for the primal problem.

Starting from w = 0, every step takes a full-batch subgradient step of size
1/(lambda t), projects onto the sign cone S and then onto the ball of radius
sqrt(2/lambda), which contains the optimum.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from scsvm.config import ScheduleKind, SolverName, get_settings
from scsvm.errors import ConfigError, InternalInvariantError, NonFiniteObjectiveError
from scsvm.models import Dataset, PrimalModel, SignMask, TraceRecord, TrainingMeta
from scsvm.services.objectives import (
    primal_value,
    project_ball,
    project_sign_cone,
    subgradient_value,
)

logger = logging.getLogger(__name__)

# Slack on the ball radius for the feasibility assertion
BALL_RTOL = 1e-10


def log_schedule(max_iter: int, points: int = 55) -> tuple[int, ...]:
    """Log-spaced iteration numbers in [1, max_iter].

    Returns exactly min(points, max_iter) distinct values ending at max_iter:
    consecutive integers while geometric spacing would be finer than 1, then
    a geometric progression.
    """
    if max_iter < 1 or points < 1:
        raise ConfigError("max_iter and points must be positive")
    if points >= max_iter:
        return tuple(range(1, max_iter + 1))
    if points == 1:
        return (max_iter,)

    values = [1.0]
    ratio = max_iter ** (1.0 / (points - 1))
    while len(values) < points:
        candidate = values[-1] * ratio
        if candidate - values[-1] >= 1.0:
            values.append(candidate)
        else:
            values.append(values[-1] + 1.0)
            remaining = points - len(values)
            if remaining > 0:
                ratio = (max_iter / values[-1]) ** (1.0 / remaining)
    schedule = [int(round(x)) for x in values]
    schedule[-1] = max_iter
    return tuple(schedule)


def full_schedule(max_iter: int) -> tuple[int, ...]:
    """Every iteration 1..max_iter."""
    return tuple(range(1, max_iter + 1))


def make_schedule(kind: ScheduleKind, max_iter: int, points: int | None = None) -> tuple[int, ...]:
    """Build an evaluation schedule by kind."""
    if kind is ScheduleKind.ALL:
        return full_schedule(max_iter)
    return log_schedule(max_iter, points or get_settings().eval_points)


@dataclass(frozen=True)
class PgConfig:
    """Projected-gradient run parameters.

    The solver is deterministic; seed is carried for provenance only.
    """

    lam: float
    max_iter: int = 100
    eval_schedule: tuple[int, ...] = field(default=())
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ConfigError(f"lambda must be positive, got {self.lam}")
        if self.max_iter < 1:
            raise ConfigError(f"max_iter must be at least 1, got {self.max_iter}")
        schedule = tuple(int(t) for t in self.eval_schedule) or log_schedule(
            self.max_iter, get_settings().eval_points
        )
        if any(b <= a for a, b in zip(schedule, schedule[1:])):
            raise ConfigError("eval_schedule must be strictly increasing")
        if schedule[0] < 1 or schedule[-1] > self.max_iter:
            raise ConfigError(f"eval_schedule must lie in [1, {self.max_iter}]")
        object.__setattr__(self, "eval_schedule", schedule)


@dataclass
class PgResult:
    """Outcome of pg_train: the best recorded iterate and the trace."""

    model: PrimalModel
    trace: list[TraceRecord]
    best_iter: int
    best_primal: float


def pg_bound(lam: float, R: float, T: int) -> float:
    """Primal error bound (sqrt(2 lambda) + R)^2 log(T) / (lambda T)."""
    if lam <= 0:
        raise ConfigError(f"lambda must be positive, got {lam}")
    if T <= 1:
        raise ConfigError(f"the bound needs log(T) > 0, got T={T}")
    return (math.sqrt(2.0 * lam) + R) ** 2 * math.log(T) / (lam * T)


def pg_train(data: Dataset, mask: SignMask, cfg: PgConfig) -> PgResult:
    """Run exactly max_iter projected subgradient steps.

    Args:
        data: Training data (preprocessed feature space)
        mask: Sign constraints
        cfg: Run parameters

    Returns:
        PgResult whose model is the recorded iterate with the smallest P;
        trace row t describes the iterate after t updates
    """
    mask.check_dim(data.d)
    settings = get_settings()
    lam = cfg.lam
    radius = math.sqrt(2.0 / lam)
    schedule = set(cfg.eval_schedule)

    logger.info(
        "Projected gradient: n=%d d=%d lambda=%.3g max_iter=%d recorded=%d",
        data.n, data.d, lam, cfg.max_iter, len(schedule),
    )
    w = np.zeros(data.d)
    best_w, best_primal, best_iter = w, math.inf, 0
    trace: list[TraceRecord] = []
    start = time.perf_counter_ns()
    for t in range(1, cfg.max_iter + 1):
        step = subgradient_value(w, data, lam) / (lam * t)
        w = project_ball(project_sign_cone(w - step, mask), lam)

        if settings.debug_checks:
            if np.any(mask.sigma * w < 0.0):
                raise InternalInvariantError(f"iterate {t} left the sign cone")
            if np.linalg.norm(w) > radius * (1.0 + BALL_RTOL):
                raise InternalInvariantError(f"iterate {t} left the ball")

        if t in schedule:
            primal = primal_value(w, data, lam)
            if not math.isfinite(primal):
                raise NonFiniteObjectiveError(SolverName.PG.value, t, primal)
            elapsed = time.perf_counter_ns() - start
            trace.append(TraceRecord(iter=t, primal=primal, elapsed_ns=elapsed))
            logger.debug("PG iter %d: P=%.10g", t, primal)
            if primal < best_primal:
                best_w, best_primal, best_iter = w, primal, t

    logger.info("Projected gradient finished: best P=%.10g at iteration %d", best_primal, best_iter)
    meta = TrainingMeta(solver=SolverName.PG, iterations=cfg.max_iter)
    model = PrimalModel(w=best_w, lam=lam, sign_mask=mask, meta=meta)
    return PgResult(model=model, trace=trace, best_iter=best_iter, best_primal=best_primal)
