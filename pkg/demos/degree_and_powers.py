"""
Degrees of sampled circle maps
==============================

A map of the circle to itself is stored as a phase lift sampled on a
uniform grid.  The degree is read off the closing increment of the lift,
and raising the map to the k-th power multiplies the degree by k.
"""

import numpy as np

from circdeg import (degree, family_blaschke, family_perturbed, family_power, pow_map,
                     check_power_identity, conjugate, rotate)
from circdeg.errors import JumpTooLarge

# a few members of the test families
maps = {
    "z^3": family_power(3, 1024),
    "perturbed d=2": family_perturbed(2, 0.5, 3, 2048),
    "Blaschke |a|=0.9": family_blaschke(0.9, 0.0, 8192),
}
for name, f in maps.items():
    print(f"{name:18s} N={f.grid_size:5d}  degree={degree(f).degree:+d}  "
          f"largest step={f.max_step:.4f}")

# rotation keeps the degree, conjugation flips it
f = maps["perturbed d=2"]
print("rotated:", degree(rotate(f, 1.0)).degree, " conjugated:", degree(conjugate(f)).degree)

# deg(f^k) = k deg f, as long as f^k is still resolved by the grid
for k in (1, 3, 7):
    print(f"k={k}: deg f^k = {degree(pow_map(f, k)).degree}, identity holds: "
          f"{check_power_identity(f, k)}")

# powering a coarse map too far is refused instead of silently aliasing
try:
    pow_map(family_power(2, 64), 20)
except JumpTooLarge as exc:
    print("refused:", exc)

# the Blaschke factor concentrates its winding near the point a
theta = maps["Blaschke |a|=0.9"].steps
print("share of the winding in the busiest 10% of the circle:",
      np.sort(theta)[-len(theta) // 10:].sum() / theta.sum())
