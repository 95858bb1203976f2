"""Slow but independent reference computations.

None of these reuse the solver or line-search code paths they are meant to
check (reference_optimum excepted, which is a long FW run): objectives are
evaluated with explicit loops or fresh array code, the LMO by enumeration
and the line search on a dense grid.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from sklearn.svm import LinearSVC

from scsvm.errors import ConfigError, DimensionMismatchError, OracleSizeError
from scsvm.models import Dataset, SignMask
from scsvm.services.fw_solver import FwConfig, fw_train

logger = logging.getLogger(__name__)

# Largest n for exhaustive corner enumeration
MAX_ENUMERATION_N = 20

# Grid evaluations per chunk in grid_line_search
GRID_CHUNK = 10_000

REFERENCE_GAP = 1e-9


@dataclass(frozen=True)
class OracleConfig:
    """Resolution of the oracles."""

    grid_points: int = 10**5
    fd_step: float = 1e-6
    reference_iters: int = 10**4

    def __post_init__(self) -> None:
        if self.grid_points < 2:
            raise ConfigError(f"grid_points must be at least 2, got {self.grid_points}")
        if not self.fd_step > 0:
            raise ConfigError(f"fd_step must be positive, got {self.fd_step}")
        if self.reference_iters < 1:
            raise ConfigError(f"reference_iters must be positive, got {self.reference_iters}")


def naive_primal_objective(
    w: np.ndarray,
    features: np.ndarray,
    labels: np.ndarray,
    lam: float,
) -> float:
    """P(w) with one explicit loop over examples."""
    total = 0.0
    for x, y in zip(features, labels):
        total += max(0.0, 1.0 - float(y) * float(np.dot(x, w)))
    return 0.5 * lam * float(np.dot(w, w)) + total / len(labels)


def naive_weights(
    alpha: np.ndarray,
    features: np.ndarray,
    labels: np.ndarray,
    sigma: np.ndarray,
    lam: float,
) -> np.ndarray:
    """w(alpha) built feature by feature."""
    n, d = features.shape
    w = np.zeros(d)
    for h in range(d):
        v_h = sum(alpha[i] * labels[i] * features[i, h] for i in range(n)) / (lam * n)
        w[h] = max(0.0, v_h) if sigma[h] == 1 else v_h
    return w


def naive_dual_objective(
    alpha: np.ndarray,
    features: np.ndarray,
    labels: np.ndarray,
    sigma: np.ndarray,
    lam: float,
) -> float:
    """D(alpha) from naive_weights."""
    w = naive_weights(alpha, features, labels, sigma, lam)
    return -0.5 * lam * float(np.dot(w, w)) + float(np.sum(alpha)) / len(labels)


def finite_difference_directional(
    f: Callable[[np.ndarray], float],
    x: np.ndarray,
    direction: np.ndarray,
    step: float = 1e-6,
) -> float:
    """Central difference (f(x + s d) - f(x - s d)) / 2s."""
    return (f(x + step * direction) - f(x - step * direction)) / (2.0 * step)


def _dual_on_grid(
    alpha: np.ndarray,
    q: np.ndarray,
    data: Dataset,
    mask: SignMask,
    lam: float,
    etas: np.ndarray,
) -> np.ndarray:
    n = data.n
    base = data.cols @ alpha / (lam * n)
    slope = data.cols @ q / (lam * n)
    v = base[:, None] + slope[:, None] * etas[None, :]
    constrained = mask.sigma.astype(bool)
    v[constrained] = np.maximum(v[constrained], 0.0)
    return -0.5 * lam * np.sum(v * v, axis=0) + (np.sum(alpha) + etas * np.sum(q)) / n


def grid_line_search(
    alpha: np.ndarray,
    q: np.ndarray,
    data: Dataset,
    mask: SignMask,
    lam: float,
    grid_points: int = 10**5,
) -> tuple[float, float]:
    """Maximize D(alpha + eta q) over a uniform grid of [0, 1].

    Returns:
        (eta, value) at the best grid point (first one on ties)
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if alpha.shape != (data.n,) or q.shape != (data.n,):
        raise DimensionMismatchError("alpha/q", data.n, q.shape[0])
    if not np.any(q):
        raise ValueError("direction q must be nonzero")
    if grid_points < 2:
        raise ConfigError(f"grid_points must be at least 2, got {grid_points}")

    etas = np.linspace(0.0, 1.0, grid_points)
    best_eta, best_value = 0.0, -math.inf
    for start in range(0, grid_points, GRID_CHUNK):
        chunk = etas[start:start + GRID_CHUNK]
        values = _dual_on_grid(alpha, q, data, mask, lam, chunk)
        k = int(np.argmax(values))
        if values[k] > best_value:
            best_eta, best_value = float(chunk[k]), float(values[k])
    return best_eta, best_value


def dual_gradient(alpha: np.ndarray, data: Dataset, mask: SignMask, lam: float) -> np.ndarray:
    """g_i = (1 - <w(alpha), col_i>) / n, with w(alpha) built by naive_weights."""
    w = naive_weights(alpha, data.features(), data.labels, mask.sigma, lam)
    return (1.0 - data.cols.T @ w) / data.n


def exhaustive_lmo(
    alpha: np.ndarray,
    data: Dataset,
    mask: SignMask,
    lam: float,
) -> np.ndarray:
    """Best corner of [0, 1]^n for the linearized dual by full enumeration.

    Corner c has u_i = bit i of c; the lowest c wins ties.
    """
    n = data.n
    if n > MAX_ENUMERATION_N:
        raise OracleSizeError(f"exhaustive LMO supports n <= {MAX_ENUMERATION_N}, got {n}")
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape != (n,):
        raise DimensionMismatchError("alpha", n, alpha.shape[0])
    g = dual_gradient(alpha, data, mask, lam)
    bits = np.arange(n)

    best_corner, best_value = 0, -math.inf
    chunk = 1 << min(n, 16)
    for start in range(0, 1 << n, chunk):
        corners = np.arange(start, start + chunk, dtype=np.int64)
        values = ((corners[:, None] >> bits[None, :]) & 1) @ g
        k = int(np.argmax(values))
        if values[k] > best_value:
            best_corner, best_value = start + k, float(values[k])
    return ((best_corner >> bits) & 1).astype(np.float64)


@dataclass(frozen=True)
class ReferenceOptimum:
    """Tight objective estimates from a long Frank-Wolfe run.

    dual <= D* = P* <= primal holds whether or not the run converged.
    """

    primal: float
    dual: float
    gap: float
    converged: bool


def reference_optimum(
    data: Dataset,
    mask: SignMask,
    lam: float,
    config: OracleConfig = OracleConfig(),
) -> ReferenceOptimum:
    """Run FW to a 1e-9 gap (or reference_iters) and return P and D there."""
    cfg = FwConfig(
        lam=lam,
        epsilon=REFERENCE_GAP,
        max_iter=config.reference_iters,
        record_stride=config.reference_iters,
    )
    result = fw_train(data, mask, cfg)
    if not result.certified:
        logger.warning(
            "Reference run stopped at gap %.3e after %d iterations", result.gap, result.iterations
        )
    return ReferenceOptimum(
        primal=result.primal,
        dual=result.dual,
        gap=result.gap,
        converged=result.certified,
    )


def unconstrained_reference(data: Dataset, lam: float, tol: float = 1e-10) -> np.ndarray:
    """Weights of the sigma = 0 problem from liblinear.

    LinearSVC minimizes ||w||^2 / 2 + C sum hinge, which is P / lambda for
    C = 1 / (lambda n).
    """
    data.require_both_classes()
    svc = LinearSVC(
        loss="hinge",
        fit_intercept=False,
        C=1.0 / (lam * data.n),
        dual=True,
        tol=tol,
        max_iter=10**6,
        random_state=0,
    )
    svc.fit(data.features(), data.labels)
    return np.asarray(svc.coef_[0], dtype=np.float64)
