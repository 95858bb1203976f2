"""Oracle suite run by `scsvm verify`: solver components against independent references."""
from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

import numpy as np

from scsvm.models import Dataset, DualState, SignMask
from scsvm.services.fw_solver import FwConfig, fw_iteration_bound, fw_rate_bound, fw_train, lmo
from scsvm.services.line_search import LineSearchInput, exact_line_search
from scsvm.services.oracles import (
    OracleConfig,
    dual_gradient,
    exhaustive_lmo,
    grid_line_search,
    naive_dual_objective,
    reference_optimum,
)
from scsvm.services.pg_solver import PgConfig, full_schedule, pg_bound, pg_train
from scsvm.services.synthetic import random_alpha, random_instance

logger = logging.getLogger(__name__)

LINE_SEARCH_TOL = 1e-8
COEFFICIENT_TOL = 1e-10
CONTINUITY_TOL = 1e-9

MAX_N = 50
MAX_D = 30
MAX_LMO_N = 16
# Random (instance, eta) pairs per line-search instance for the coefficient check
ETA_PROBES = 20
RATE_HORIZON = 500
PG_HORIZONS = (100, 1000)


class CheckName(str, Enum):
    """Checks available to the verify command."""
    LINE_SEARCH = "line-search"
    LMO = "lmo"
    RATE = "rate"
    PG_BOUND = "pg-bound"


@dataclass
class CheckResult:
    """Outcome of one check over all generated instances."""

    name: CheckName
    passed: bool
    instances: int
    detail: str = ""
    metrics: dict[str, Any] = field(default_factory=dict)

    def describe(self) -> str:
        """One report line."""
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name.value} ({self.instances} instances) {self.detail}".rstrip()


def _instance(rng: np.random.Generator, max_n: int = MAX_N) -> tuple[Dataset, SignMask]:
    n = int(rng.integers(2, max_n + 1))
    d = int(rng.integers(1, MAX_D + 1))
    return random_instance(rng, n, d, constrained_fraction=float(rng.random()))


def check_line_search(
    rng: np.random.Generator,
    instances: int,
    lam: float,
    config: OracleConfig,
) -> CheckResult:
    """Exact maximizer against the dense grid, coefficients against direct evaluation."""
    worst_grid = worst_direct = worst_continuity = 0.0
    concave = True
    done = 0
    while done < instances:
        data, mask = _instance(rng)
        alpha = random_alpha(rng, data.n)
        state = DualState.from_alpha(alpha, data, mask, lam)
        u = rng.integers(0, 2, size=data.n).astype(np.float64)
        q = u - alpha
        if not np.any(q):
            continue
        eta, pq = exact_line_search(LineSearchInput.from_direction(state, u, data, mask, lam))
        _, grid_value = grid_line_search(alpha, q, data, mask, lam, config.grid_points)
        best = float(pq.value(eta))
        worst_grid = max(worst_grid, abs(best - grid_value))

        features = data.features()
        for eta_probe in rng.random(ETA_PROBES):
            point = alpha + eta_probe * q
            direct = naive_dual_objective(point, features, data.labels, mask.sigma, lam)
            worst_direct = max(worst_direct, abs(float(pq.value(eta_probe)) - direct))
        if pq.n_intervals > 1:
            worst_continuity = max(
                worst_continuity,
                float(pq.slope_residuals().max()),
                float(pq.value_residuals().max()),
            )
        concave = concave and bool(np.all(pq.a <= 0.0))
        done += 1

    passed = (
        worst_grid <= LINE_SEARCH_TOL
        and worst_direct <= COEFFICIENT_TOL
        and worst_continuity <= CONTINUITY_TOL
        and concave
    )
    return CheckResult(
        name=CheckName.LINE_SEARCH,
        passed=passed,
        instances=instances,
        detail=(
            f"max |zeta(eta*) - grid| = {worst_grid:.2e}, "
            f"max |zeta - D| = {worst_direct:.2e} over {instances * ETA_PROBES} pairs, "
            f"max continuity residual = {worst_continuity:.2e}, concave = {concave}"
        ),
        metrics={
            "grid": worst_grid,
            "direct": worst_direct,
            "continuity": worst_continuity,
            "pairs": instances * ETA_PROBES,
        },
    )


def check_lmo(rng: np.random.Generator, instances: int, lam: float) -> CheckResult:
    """Closed-form LMO against enumeration of every corner."""
    mismatches = 0
    for _ in range(instances):
        data, mask = _instance(rng, MAX_LMO_N)
        alpha = random_alpha(rng, data.n)
        state = DualState.from_alpha(alpha, data, mask, lam)
        g = dual_gradient(alpha, data, mask, lam)
        fast = lmo(state, data)
        slow = exhaustive_lmo(alpha, data, mask, lam)
        if math.fsum(g[fast == 1.0]) != math.fsum(g[slow == 1.0]):
            mismatches += 1
    return CheckResult(
        name=CheckName.LMO,
        passed=mismatches == 0,
        instances=instances,
        detail=f"{mismatches} objective mismatches",
        metrics={"mismatches": mismatches},
    )


def check_rate(
    rng: np.random.Generator,
    instances: int,
    lam: float,
    epsilon: float,
    config: OracleConfig,
) -> CheckResult:
    """FW dual error against 2 R^2 / (lambda (T + 2)) and the iteration bound for epsilon."""
    bound = fw_iteration_bound(lam, 1.0, epsilon)
    observed = []
    violations = 0
    for _ in range(instances):
        data, mask = _instance(rng)
        reference = reference_optimum(data, mask, lam, config)
        horizon = FwConfig(lam=lam, epsilon=1e-15, max_iter=RATE_HORIZON)
        for record in fw_train(data, mask, horizon).trace:
            if record.dual is None or record.iter == 0:
                continue
            if reference.dual - record.dual > fw_rate_bound(lam, data.R, record.iter):
                violations += 1
                break
        run = fw_train(data, mask, FwConfig(lam=lam, epsilon=epsilon, max_iter=max(bound, 1)))
        observed.append(run.iterations)
        if reference.dual - run.dual > epsilon:
            violations += 1
    return CheckResult(
        name=CheckName.RATE,
        passed=violations == 0,
        instances=instances,
        detail=f"bound {bound} iterations, observed {max(observed)} (max), {violations} violations",
        metrics={"bound": bound, "observed": observed, "violations": violations},
    )


def check_pg_bound(
    rng: np.random.Generator,
    instances: int,
    lam: float,
    config: OracleConfig,
) -> CheckResult:
    """Best PG primal error against (sqrt(2 lambda) + R)^2 log T / (lambda T)."""
    violations = 0
    worst_ratio = 0.0
    for _ in range(instances):
        data, mask = _instance(rng)
        reference = reference_optimum(data, mask, lam, config)
        horizon = max(PG_HORIZONS)
        cfg = PgConfig(lam=lam, max_iter=horizon, eval_schedule=full_schedule(horizon))
        trace = pg_train(data, mask, cfg).trace
        for T in PG_HORIZONS:
            best = min(r.primal for r in trace if r.iter <= T)
            error = best - reference.dual
            bound = pg_bound(lam, data.R, T)
            worst_ratio = max(worst_ratio, error / bound)
            if error > bound:
                violations += 1
    return CheckResult(
        name=CheckName.PG_BOUND,
        passed=violations == 0,
        instances=instances,
        detail=f"worst error/bound = {worst_ratio:.3f}, {violations} violations",
        metrics={"worst_ratio": worst_ratio, "violations": violations},
    )


def run_checks(
    seed: int = 0,
    checks: Optional[Iterable[CheckName]] = None,
    instances: int = 20,
    lam: float = 0.1,
    epsilon: float = 0.01,
    config: OracleConfig = OracleConfig(),
) -> list[CheckResult]:
    """Run the selected checks (all by default) on instances drawn from seed.

    Each check gets its own generator derived from seed, so selecting a
    subset does not change the instances a check sees.
    """
    selected = list(checks) if checks is not None else list(CheckName)
    runners: dict[CheckName, Callable[[np.random.Generator], CheckResult]] = {
        CheckName.LINE_SEARCH: lambda rng: check_line_search(rng, instances, lam, config),
        CheckName.LMO: lambda rng: check_lmo(rng, instances, lam),
        CheckName.RATE: lambda rng: check_rate(rng, instances, lam, epsilon, config),
        CheckName.PG_BOUND: lambda rng: check_pg_bound(rng, instances, lam, config),
    }
    results = []
    for position, name in enumerate(CheckName):
        if name not in selected:
            continue
        rng = np.random.default_rng([seed, position])
        result = runners[name](rng)
        logger.info(result.describe())
        results.append(result)
    return results
