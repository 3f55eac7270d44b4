"""Power-trick machinery: averaging weights over powers and the threshold-to-power plan."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circle_map import UnitPoint
from .errors import InvalidExponent, InvalidThreshold

__all__ = [
    "WeightScheme",
    "ThresholdPlan",
    "ALPHA0",
    "SQRT3",
    "C5",
    "zeta_partial",
    "build_weights",
    "weighted_kernel",
    "weighted_kernel_profile",
    "threshold_plan",
    "check_separation_implication",
]

ALPHA0 = 2.0 * math.pi / 3.0
SQRT3 = math.sqrt(3.0)
# composing 1/n <= 2 alpha/alpha0 with alpha <= (2 pi / (3 sqrt 3)) delta
C5 = 2.0 / SQRT3


def zeta_partial(p: float, tol: float = 1e-12):
    """``sum_{j>=1} j^{-p}`` with an error bound, usable all the way down to ``p -> 1``.

    Euler-Maclaurin at cutoff ``M``: the partial sum to ``M-1``, the integral
    tail ``M^{1-p}/(p-1)``, the endpoint term ``M^{-p}/2`` and the first
    Bernoulli correction ``p M^{-p-1}/12``.  The remainder is bounded by the
    next correction ``p(p+1)(p+2) M^{-p-3}/720``; ``M`` doubles until that
    bound is below ``tol``.

    Returns ``(value, error_bound)``.
    """
    if not p > 1.0 or not math.isfinite(p):
        raise InvalidExponent(f"zeta sum needs p > 1, got {p!r}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = 16
    while p * (p + 1) * (p + 2) / 720.0 * m ** (-p - 3) > tol:
        m *= 2
    head = math.fsum(np.arange(1, m, dtype=float) ** -p)
    value = math.fsum([head, m ** (1 - p) / (p - 1), 0.5 * m ** -p, p / 12.0 * m ** (-p - 1)])
    err = p * (p + 1) * (p + 2) / 720.0 * m ** (-p - 3)
    assert value >= 1.0 / (p - 1), "zeta(p) must dominate 1/(p-1)"
    return value, err


@dataclass(frozen=True, eq=False)
class WeightScheme:
    """Weights ``a_k = k^{-p-1} / zeta(p)`` truncated at ``K``.

    ``tail_bound`` certifies ``4 sum_{k>K} a_k`` (the largest possible
    contribution of the dropped powers, since ``|z^k - w^k| <= 2``) and
    ``moment_tail`` certifies ``1 - sum_{k<=K} a_k k``.
    """

    p: float
    K: int
    weights: np.ndarray
    zeta_p: float
    zeta_error: float
    tail_bound: float
    moment_tail: float

    @property
    def first_moment(self) -> float:
        return math.fsum(self.weights * np.arange(1, self.K + 1))


def build_weights(p: float, tail_tol: float = 1e-6) -> WeightScheme:
    if not (1.0 < p <= 1.5) or not math.isfinite(p):
        raise InvalidExponent(f"weight scheme needs 1 < p <= 3/2, got {p!r}")
    if tail_tol <= 0:
        raise ValueError("tail_tol must be positive")
    K = math.ceil((4.0 * (p - 1.0) / tail_tol) ** (1.0 / p))
    while K > 1 and 4.0 * (p - 1.0) * (K - 1) ** -p <= tail_tol:
        K -= 1
    while 4.0 * (p - 1.0) * K ** -p > tail_tol:
        K += 1
    zeta, zerr = zeta_partial(p)
    zeta_lo = zeta - zerr
    k = np.arange(1, K + 1, dtype=float)
    weights = k ** (-p - 1.0) / zeta
    weights.setflags(write=False)
    # sum_{k>K} k^{-p-1} <= K^{-p}/p and sum_{k>K} k^{-p} <= K^{1-p}/(p-1)
    tail = 4.0 * K ** -p / (p * zeta_lo)
    moment_tail = K ** (1.0 - p) / ((p - 1.0) * zeta_lo)
    return WeightScheme(p, K, weights, zeta, zerr, tail, min(1.0, moment_tail))


def weighted_kernel_profile(ws: WeightScheme, delta_angle) -> np.ndarray:
    """``sum_{k<=K} a_k |z^k - w^k|^2`` as a function of the angle gap ``arg z - arg w``."""
    delta_angle = np.atleast_1d(np.asarray(delta_angle, dtype=float))
    k = np.arange(1, ws.K + 1, dtype=float)
    out = np.empty(delta_angle.size)
    step = max(1, (1 << 22) // ws.K)
    for lo in range(0, delta_angle.size, step):
        d = delta_angle[lo:lo + step, None]
        chords2 = 4.0 * np.sin(0.5 * k[None, :] * d) ** 2
        out[lo:lo + step] = chords2 @ ws.weights
    return out


def weighted_kernel(ws: WeightScheme, z: UnitPoint, w: UnitPoint):
    """Truncated weighted power sum for the pair ``(z, w)`` and its certified upper bound."""
    value = float(weighted_kernel_profile(ws, z.angle - w.angle)[0])
    return value, value + ws.tail_bound


@dataclass(frozen=True)
class ThresholdPlan:
    delta: float
    alpha: float
    n: int
    inv_n_bound: float
    alpha0: float = ALPHA0


def threshold_plan(delta: float) -> ThresholdPlan:
    """Power ``n`` that turns chord separation ``delta`` into the fixed threshold sqrt(3)."""
    if not (0.0 < delta <= SQRT3):
        raise InvalidThreshold(f"delta={delta!r} must lie in (0, sqrt(3)]")
    alpha = 2.0 * math.asin(0.5 * delta)
    if delta == SQRT3:
        alpha = ALPHA0
    n = max(1, math.floor(ALPHA0 / alpha))
    return ThresholdPlan(delta, alpha, n, 2.0 * alpha / ALPHA0)


def check_separation_implication(plan: ThresholdPlan, grid_size: int = 100_000) -> list:
    """Angles ``theta in [0, alpha)`` where ``|a - b| < delta`` but ``|a^n - b^n| >= sqrt 3``.

    With ``n theta < pi`` the power does not wrap, so the chord of the
    powered pair is ``2 sin(n theta / 2)``.  The returned list should be empty.
    """
    if grid_size < 1000:
        raise ValueError("grid_size must be at least 1000")
    theta = plan.alpha * np.arange(grid_size) / grid_size
    a = UnitPoint(0.0)
    bad = []
    for t in theta[(2.0 * np.sin(0.5 * plan.n * theta) >= SQRT3)]:
        b = UnitPoint(float(t))
        if a.chord(b) < plan.delta:
            bad.append(float(t))
    return bad
