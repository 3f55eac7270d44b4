"""Continuous circle-valued maps stored as sampled phase lifts.

A map ``f: S^1 -> S^1`` is represented by samples of a continuous lift
``theta`` at the arclength points ``s_i = 2*pi*i/N`` together with the
closing increment ``W = theta(2*pi) - theta(0)``.  Between samples the lift
is linear, so every ``CircleMap`` is an honest continuous map and
``pow_map`` (multiplying phases by ``k``) is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import JumpTooLarge, NonIntegerWinding

TWO_PI = 2.0 * math.pi
DEFAULT_MARGIN = 0.1
MIN_GRID = 8
WINDING_TOL = 1e-9

__all__ = [
    "CircleMap",
    "UnitPoint",
    "from_phase_samples",
    "from_complex_samples",
    "family_constant",
    "family_identity",
    "family_power",
    "family_perturbed",
    "family_blaschke",
    "pow_map",
    "rotate",
    "conjugate",
    "refine",
]


@dataclass(frozen=True)
class UnitPoint:
    """A point of the unit circle, stored by its angle so ``|z| = 1`` exactly."""

    angle: float

    @property
    def value(self) -> complex:
        return complex(math.cos(self.angle), math.sin(self.angle))

    def chord(self, other: "UnitPoint") -> float:
        return 2.0 * abs(math.sin(0.5 * (self.angle - other.angle)))


@dataclass(frozen=True, eq=False)
class CircleMap:
    phase: np.ndarray
    winding_increment: float
    margin: float = DEFAULT_MARGIN
    _steps: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        phase = np.array(self.phase, dtype=float)
        phase.setflags(write=False)
        object.__setattr__(self, "phase", phase)
        steps = np.empty_like(phase)
        steps[:-1] = np.diff(phase)
        steps[-1] = phase[0] + self.winding_increment - phase[-1]
        steps.setflags(write=False)
        object.__setattr__(self, "_steps", steps)

    @property
    def grid_size(self) -> int:
        return self.phase.size

    @property
    def spacing(self) -> float:
        return TWO_PI / self.grid_size

    @property
    def steps(self) -> np.ndarray:
        """Lift increments ``theta_{i+1} - theta_i``; the last one closes the loop."""
        return self._steps

    @property
    def max_step(self) -> float:
        return float(np.max(np.abs(self._steps)))

    @property
    def lipschitz(self) -> float:
        """Largest slope of the piecewise-linear lift."""
        return self.max_step / self.spacing

    @property
    def grid(self) -> np.ndarray:
        return self.spacing * np.arange(self.grid_size)

    def values(self) -> np.ndarray:
        return np.exp(1j * self.phase)

    def lift_at_index(self, x):
        """Evaluate the lift at fractional grid index ``x`` (``s = x * h``)."""
        x = np.asarray(x, dtype=float)
        n = self.grid_size
        j = np.floor(x)
        r = x - j
        j = j.astype(np.int64)
        q0, j0 = np.divmod(j, n)
        q1, j1 = np.divmod(j + 1, n)
        w = self.winding_increment
        left = self.phase[j0] + w * q0
        right = self.phase[j1] + w * q1
        return left + r * (right - left)

    def lift_at(self, s):
        """Evaluate the continuous lift at arclength positions ``s``."""
        return self.lift_at_index(np.asarray(s, dtype=float) / self.spacing)

    def __repr__(self):
        return (f"CircleMap(N={self.grid_size}, "
                f"degree={self.winding_increment / TWO_PI:.0f}, "
                f"max_step={self.max_step:.3g})")


def _check_steps(steps, margin):
    limit = math.pi * (1.0 - margin)
    worst = float(np.max(np.abs(steps)))
    if worst >= limit:
        i = int(np.argmax(np.abs(steps)))
        raise JumpTooLarge(
            f"lift step {worst:.4g} at index {i} reaches pi*(1-margin) = {limit:.4g}; "
            "sample the map more finely")


def from_phase_samples(samples, winding_increment: float,
                       margin: float = DEFAULT_MARGIN) -> CircleMap:
    """Build a map from lift samples on the uniform grid.

    The samples must already be a continuous lift: consecutive raw
    differences (and the closing step ``theta_0 + W - theta_{N-1}``) stay
    below ``pi * (1 - margin)``.
    """
    phase = np.asarray(samples, dtype=float)
    if phase.ndim != 1 or phase.size < MIN_GRID:
        raise ValueError(f"need a 1-d array of at least {MIN_GRID} samples")
    if not 0.0 < margin <= 0.5:
        raise ValueError("margin must lie in (0, 0.5]")
    if not np.all(np.isfinite(phase)) or not math.isfinite(winding_increment):
        raise ValueError("phases must be finite")
    turns = winding_increment / TWO_PI
    if abs(turns - round(turns)) >= WINDING_TOL:
        raise NonIntegerWinding(
            f"closing increment {winding_increment!r} is {turns!r} turns")
    fmap = CircleMap(phase, float(winding_increment), margin)
    _check_steps(fmap.steps, margin)
    return fmap


def from_complex_samples(values, margin: float = DEFAULT_MARGIN) -> CircleMap:
    """Lift unit complex samples by unwrapping; the jump invariant is still enforced."""
    values = np.asarray(values, dtype=complex)
    angles = np.angle(values)
    closed = np.unwrap(np.append(angles, angles[0]))
    turns = round((closed[-1] - closed[0]) / TWO_PI)
    return from_phase_samples(closed[:-1], TWO_PI * turns, margin)


def _grid(n):
    return TWO_PI * np.arange(n) / n


def _require_resolution(slope, n, margin, what):
    if slope * TWO_PI / n >= math.pi * (1.0 - margin):
        raise JumpTooLarge(f"{what}: slope bound {slope:.4g} needs more than N={n} samples")


def family_constant(n: int, value: float = 0.0) -> CircleMap:
    return from_phase_samples(np.full(n, float(value)), 0.0)


def family_power(d: int, n: int, margin: float = DEFAULT_MARGIN) -> CircleMap:
    """The map ``z -> z**d`` sampled on ``n`` points."""
    d = int(d)
    if n < 8 * max(1, abs(d)):
        raise JumpTooLarge(f"power map of degree {d} needs N >= {8 * max(1, abs(d))}, got {n}")
    return from_phase_samples(d * _grid(n), TWO_PI * d, margin)


def family_identity(n: int) -> CircleMap:
    return family_power(1, n)


def family_perturbed(d: int, eps: float, m: int, n: int,
                     margin: float = DEFAULT_MARGIN) -> CircleMap:
    """Lift ``d*x + eps*sin(m*x)``; the perturbation is periodic so the degree stays ``d``."""
    _require_resolution(abs(d) + abs(eps * m), n, margin, "perturbed map")
    s = _grid(n)
    return from_phase_samples(d * s + eps * np.sin(m * s), TWO_PI * int(d), margin)


def family_blaschke(a_modulus: float, a_angle: float, n: int,
                    margin: float = DEFAULT_MARGIN) -> CircleMap:
    """Blaschke factor ``z -> (z - a)/(1 - conj(a) z)`` with ``a = r e^{i phi}``.

    On the circle its argument is ``s + 2*atan2(r sin(s-phi), 1 - r cos(s-phi))``,
    continuous for ``r < 1`` because the second atan2 argument stays positive.
    """
    r = float(a_modulus)
    if not 0.0 <= r < 1.0:
        raise ValueError("a_modulus must lie in [0, 1)")
    _require_resolution((1.0 + r) / (1.0 - r), n, margin, "Blaschke factor")
    psi = _grid(n) - a_angle
    theta = _grid(n) + 2.0 * np.arctan2(r * np.sin(psi), 1.0 - r * np.cos(psi))
    return from_phase_samples(theta, TWO_PI, margin)


def pow_map(f: CircleMap, k: int) -> CircleMap:
    """The pointwise power ``f**k``: phases and closing increment scale by ``k``."""
    k = int(k)
    if k < 1:
        raise ValueError("power must be a positive integer")
    if k == 1:
        return f
    return from_phase_samples(k * f.phase, k * f.winding_increment, f.margin)


def rotate(f: CircleMap, phi: float) -> CircleMap:
    return CircleMap(f.phase + phi, f.winding_increment, f.margin)


def conjugate(f: CircleMap) -> CircleMap:
    return CircleMap(-f.phase, -f.winding_increment, f.margin)


def refine(f: CircleMap, factor: int) -> CircleMap:
    """Resample on a grid ``factor`` times finer.

    The piecewise-linear lift is unchanged, so this represents exactly the
    same continuous map with smaller steps.
    """
    factor = int(factor)
    if factor < 1:
        raise ValueError("factor must be a positive integer")
    if factor == 1:
        return f
    x = np.arange(f.grid_size * factor) / factor
    return CircleMap(f.lift_at_index(x), f.winding_increment, f.margin)
