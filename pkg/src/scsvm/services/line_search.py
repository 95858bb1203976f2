"""Exact line search for the dual objective along a Frank-Wolfe segment.

Along alpha + eta q the pre-projection vector is v0 + eta vq, so each
constrained coordinate is clipped at zero on one side of -v_{h,0} / v_{h,q}.
Between consecutive sign changes the dual is an ordinary concave quadratic,

    zeta(eta) = a_k eta^2 + b_k eta + c_k   on [theta_k, theta_{k+1}],

and the pieces join with matching value and slope. The maximizer over
[0, 1] follows from the slope signs at the interval endpoints.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from scsvm.errors import DimensionMismatchError, InternalInvariantError
from scsvm.models import Dataset, DualState, SignMask

logger = logging.getLogger(__name__)

# Breakpoints closer than this are merged into one endpoint
BREAKPOINT_TOL = 1e-12

# Relative slack for the concavity/continuity checks in maximize()
SLOPE_TOL = 1e-9


@dataclass(frozen=True)
class LineSearchInput:
    """Everything the line search needs about alpha and the direction q = u - alpha."""

    v0: np.ndarray
    vq: np.ndarray
    sum_alpha: float
    sum_q: float
    mask: SignMask
    lam: float
    n: int

    def __post_init__(self) -> None:
        v0 = np.asarray(self.v0, dtype=np.float64)
        vq = np.asarray(self.vq, dtype=np.float64)
        if v0.shape != vq.shape:
            raise DimensionMismatchError("vq", v0.shape[0], vq.shape[0])
        self.mask.check_dim(v0.shape[0])
        if not (np.all(np.isfinite(v0)) and np.all(np.isfinite(vq))):
            raise ValueError("line search vectors must be finite")
        object.__setattr__(self, "v0", v0)
        object.__setattr__(self, "vq", vq)

    @classmethod
    def from_direction(
        cls,
        state: DualState,
        u: np.ndarray,
        data: Dataset,
        mask: SignMask,
        lam: float,
    ) -> LineSearchInput:
        """Build the input for the segment from alpha towards the corner u."""
        q = np.asarray(u, dtype=np.float64) - state.alpha
        return cls(
            v0=state.v,
            vq=data.cols @ q / (lam * data.n),
            sum_alpha=float(np.sum(state.alpha)),
            sum_q=float(np.sum(q)),
            mask=mask,
            lam=lam,
            n=data.n,
        )

    def constrained_ratios(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (h, -v0_h / vq_h) for constrained h with vq_h != 0."""
        h = self.mask.pos_idx[self.vq[self.mask.pos_idx] != 0.0]
        return h, -self.v0[h] / self.vq[h]


@dataclass(frozen=True)
class PiecewiseQuadratic:
    """zeta(eta) = a_k eta^2 + b_k eta + c_k on [theta_k, theta_{k+1}]."""

    theta: np.ndarray  # (d_t + 1,) from 0 to 1
    a: np.ndarray  # (d_t,)
    b: np.ndarray
    c: np.ndarray

    @property
    def n_intervals(self) -> int:
        """Number of quadratic pieces d_t."""
        return int(self.a.shape[0])

    def interval_of(self, eta: np.ndarray) -> np.ndarray:
        """Index k of the piece containing each eta (right-closed at 1)."""
        eta = np.asarray(eta, dtype=np.float64)
        k = np.searchsorted(self.theta, eta, side="right") - 1
        return np.clip(k, 0, self.n_intervals - 1)

    def value(self, eta: np.ndarray | float) -> np.ndarray:
        """Evaluate zeta at one or more points of [0, 1]."""
        eta = np.asarray(eta, dtype=np.float64)
        k = self.interval_of(eta)
        return (self.a[k] * eta + self.b[k]) * eta + self.c[k]

    def derivative(self, eta: np.ndarray | float) -> np.ndarray:
        """Evaluate zeta' at one or more points of [0, 1]."""
        eta = np.asarray(eta, dtype=np.float64)
        k = self.interval_of(eta)
        return 2.0 * self.a[k] * eta + self.b[k]

    def slope_residuals(self) -> np.ndarray:
        """Slope mismatch at every interior endpoint."""
        t = self.theta[1:-1]
        left = 2.0 * self.a[:-1] * t + self.b[:-1]
        right = 2.0 * self.a[1:] * t + self.b[1:]
        return np.abs(left - right)

    def value_residuals(self) -> np.ndarray:
        """Value mismatch at every interior endpoint."""
        t = self.theta[1:-1]
        left = (self.a[:-1] * t + self.b[:-1]) * t + self.c[:-1]
        right = (self.a[1:] * t + self.b[1:]) * t + self.c[1:]
        return np.abs(left - right)


def _merge(values: np.ndarray) -> np.ndarray:
    """Sort values and drop those within BREAKPOINT_TOL of their predecessor."""
    values = np.sort(values)
    if values.size == 0:
        return values
    keep = np.concatenate(([True], np.diff(values) > BREAKPOINT_TOL))
    return values[keep]


def breakpoints(data: LineSearchInput) -> np.ndarray:
    """Sorted endpoints Theta: 0, 1 and the interior sign-change points.

    Ratios outside [0, 1] are discarded; ratios within BREAKPOINT_TOL of 0 or
    1 are merged into that boundary.
    """
    _, ratios = data.constrained_ratios()
    interior = ratios[(ratios > BREAKPOINT_TOL) & (ratios < 1.0 - BREAKPOINT_TOL)]
    return np.concatenate(([0.0], _merge(interior), [1.0]))


def active_set(data: LineSearchInput, k: int, theta: np.ndarray) -> np.ndarray:
    """Coordinates H_k that survive the projection inside interval k.

    Args:
        data: Line search input
        k: Zero-based interval index
        theta: Endpoints from breakpoints()

    Returns:
        Sorted indices I_0 plus constrained h positive at the interval midpoint
    """
    if not 0 <= k < len(theta) - 1:
        raise IndexError(f"interval {k} out of range for {len(theta) - 1} intervals")
    midpoint = 0.5 * (theta[k] + theta[k + 1])
    pos = data.mask.pos_idx
    alive = pos[data.v0[pos] + midpoint * data.vq[pos] > 0.0]
    return np.union1d(data.mask.free_idx, alive)


def build_quadratic(data: LineSearchInput) -> PiecewiseQuadratic:
    """Coefficients (a_k, b_k, c_k) of zeta on every interval.

    Membership of constrained coordinates changes only at their own
    breakpoint, so the three sums over H_k are accumulated with a sweep over
    the sorted breakpoints instead of rebuilding H_k per interval.
    """
    theta = breakpoints(data)
    n_intervals = len(theta) - 1
    v0, vq = data.v0, data.vq
    sq_q, cross, sq_0 = vq * vq, vq * v0, v0 * v0

    # Contribution of each coordinate to every interval: constant members
    # add to all intervals, crossing members enter or leave at their breakpoint.
    diff = np.zeros((3, n_intervals + 1))
    free = data.mask.free_idx
    pos = data.mask.pos_idx
    always = np.concatenate((free, pos[(vq[pos] == 0.0) & (v0[pos] > 0.0)]))
    diff[:, 0] += [sq_q[always].sum(), cross[always].sum(), sq_0[always].sum()]

    h, ratios = data.constrained_ratios()
    # Nearest endpoint for each ratio; boundary or outside means constant membership
    j = np.clip(np.searchsorted(theta, ratios), 1, n_intervals)
    j = np.where(np.abs(theta[j - 1] - ratios) < np.abs(theta[j] - ratios), j - 1, j)
    interior = (ratios > BREAKPOINT_TOL) & (ratios < 1.0 - BREAKPOINT_TOL)
    terms = np.stack((sq_q[h], cross[h], sq_0[h]))

    constant = ~interior & (v0[h] + 0.5 * vq[h] > 0.0)
    diff[:, 0] += terms[:, constant].sum(axis=1)

    rising = interior & (vq[h] > 0.0)
    np.add.at(diff.T, j[rising], terms[:, rising].T)

    falling = interior & (vq[h] < 0.0)
    diff[:, 0] += terms[:, falling].sum(axis=1)
    np.subtract.at(diff.T, j[falling], terms[:, falling].T)

    sums = np.cumsum(diff, axis=1)[:, :n_intervals]
    lam, n = data.lam, data.n
    a = -0.5 * lam * sums[0]
    b = data.sum_q / n - lam * sums[1]
    c = data.sum_alpha / n - 0.5 * lam * sums[2]
    # Accumulated sums of squares can round a hair above zero
    a = np.minimum(a, 0.0)
    return PiecewiseQuadratic(theta=theta, a=a, b=b, c=c)


def maximize(pq: PiecewiseQuadratic) -> float:
    """Closed-form maximizer eta* of zeta over [0, 1].

    Returns:
        0 when zeta'(0) <= 0, 1 when zeta'(1) >= 0, otherwise the stationary
        point of the first interval whose right-end slope is non-positive
    """
    theta, a, b = pq.theta, pq.a, pq.b
    if b[0] <= 0.0:
        return 0.0
    right = 2.0 * a * theta[1:] + b
    if right[-1] >= 0.0:
        return 1.0

    k = int(np.argmax(right <= 0.0))
    left = 2.0 * a[k] * theta[k] + b[k]
    scale = max(1.0, float(np.abs(b).max()))
    if left < -SLOPE_TOL * scale:
        raise InternalInvariantError(
            f"line search slope jumps from positive to {left:.3e} at theta={theta[k]:.6g}"
        )
    if a[k] < 0.0:
        return float(np.clip(-b[k] / (2.0 * a[k]), theta[k], theta[k + 1]))
    return float(theta[k])


def exact_line_search(data: LineSearchInput) -> tuple[float, PiecewiseQuadratic]:
    """Build zeta and return (eta*, zeta)."""
    pq = build_quadratic(data)
    eta = maximize(pq)
    logger.debug("Line search: %d intervals, eta*=%.6g", pq.n_intervals, eta)
    return eta, pq
