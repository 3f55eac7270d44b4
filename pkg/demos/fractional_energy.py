"""
The fractional energy near p = 1
================================

E_p(f) is the double integral of |f(x) - f(y)|^p / |x - y|^2.  For the
identity map it has a closed form, and (p - 1) E_p tends to 4 pi as
p decreases to 1.  This script compares the graded quadrature with the
closed form and with a brute-force tensor rule.
"""

import math

import numpy as np

from circdeg import (closed_form_identity_Ep, energy_p, energy_p_oracle, family_blaschke,
                     family_identity, family_power)

ident = family_identity(2048)

print(" p        quadrature        closed form      (p-1) E_p")
for p in (2.0, 1.5, 1.25, 1.1, 1.01, 1.001):
    r = energy_p(ident, p)
    print(f"{p:6.3f}  {r.value:16.10f}  {closed_form_identity_Ep(p):16.10f}  "
          f"{(p - 1) * r.value:10.6f}")
print("4 pi =", 4 * math.pi)

# E_2 of z^d grows linearly in d (Fejer kernel)
print("E_2(z^d) / (4 pi^2):", [round(energy_p(family_power(d, 2048), 2.0).value
                                     / (4 * math.pi ** 2), 6) for d in range(1, 6)])

# Moebius invariance: a Blaschke factor has exactly the energy of the identity
for r in (0.5, 0.9):
    print(f"Blaschke |a|={r}: E_1.5 = {energy_p(family_blaschke(r, 0.3, 4096), 1.5).value:.8f}")

# The staggered tensor rule has no diagonal correction.  At p = 2 it is
# fine; near p = 1 the missing singular part dominates.
for p in (2.0, 1.5, 1.1):
    exact = energy_p(ident, p).value
    brute = energy_p_oracle(ident, p).value
    print(f"tensor rule at p={p}: relative gap {(brute - exact) / exact:+.4f}")
