"""
Weights over powers
===================

The small-p argument averages the H^{1/2} estimate for f^k over k with
weights a_k = k^(-p-1) / zeta(p).  Their first moment is 1, and the
weighted sum of |z^k - w^k|^2 is bounded by a multiple of (p-1)|z-w|^p.
Here we build the weights and measure that multiple.
"""

import numpy as np

from circdeg import build_weights, threshold_plan, zeta_partial
from circdeg.verify import weighted_kernel_constant

for p in (1.5, 1.1, 1.01, 1.001):
    zeta, err = zeta_partial(p)
    print(f"p={p}: zeta(p)={zeta:.10f} (+-{err:.1e}), 1/(p-1)={1 / (p - 1):.1f}")

print("\n   p      K    sum a_k k   certified gap   sup ratio")
for p in (1.5, 1.25, 1.1, 1.01, 1.001):
    ws = build_weights(p, min(1e-6, 1e-3 * (p - 1)))
    c = weighted_kernel_constant(ws)
    print(f"{p:6.3f} {ws.K:7d}  {ws.first_moment:.6f}  {ws.moment_tail:12.3e}  {c:9.4f}")

# the threshold plans used by the power trick
deltas = np.geomspace(1e-3, np.sqrt(3), 8)
for d in deltas:
    plan = threshold_plan(float(d))
    print(f"delta={d:8.5f}  alpha={plan.alpha:.6f}  n={plan.n:5d}  "
          f"1/n={1 / plan.n:.5f} <= {plan.inv_n_bound:.5f}")
