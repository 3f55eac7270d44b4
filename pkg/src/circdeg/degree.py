"""Winding number of a sampled circle map and the power identity deg(f^k) = k deg f."""

from __future__ import annotations

from dataclasses import dataclass

from .circle_map import TWO_PI, WINDING_TOL, CircleMap, pow_map
from .errors import NonIntegerWinding

__all__ = ["DegreeResult", "degree", "check_power_identity"]


@dataclass(frozen=True)
class DegreeResult:
    degree: int
    residual: float

    def __int__(self):
        return self.degree


def degree(f: CircleMap) -> DegreeResult:
    """Read the degree off the closing increment of the stored lift."""
    turns = f.winding_increment / TWO_PI
    d = round(turns)
    residual = abs(turns - d)
    if residual >= WINDING_TOL:
        raise NonIntegerWinding(f"winding increment is {turns!r} turns")
    return DegreeResult(int(d), residual)


def check_power_identity(f: CircleMap, k: int) -> bool:
    return degree(pow_map(f, k)).degree == k * degree(f).degree
