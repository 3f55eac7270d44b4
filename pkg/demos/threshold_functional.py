"""
The threshold functional and the power trick
============================================

I_delta(f) counts pairs of points whose images are at least delta apart,
weighted by 1 / |x - y|^2.  For the identity, delta I_delta tends to 4 pi
as delta decreases to 0.  Raising f to the power n = floor((2 pi / 3) / alpha)
with alpha = 2 arcsin(delta / 2) converts the threshold delta into sqrt(3),
and the pairs separated by sqrt(3) after powering were already separated
by delta before.
"""

import math

from circdeg import (closed_form_identity_Idelta, family_identity, family_perturbed,
                     threshold_energy, threshold_plan)
from circdeg.powers import SQRT3
from circdeg.verify import check_energy_comparison, refine_for_power

ident = family_identity(2048)
print(" delta     I_delta(id)     closed form    delta*I_delta")
for delta in (SQRT3, 1.0, 0.5, 0.1, 0.01):
    r = threshold_energy(ident, delta)
    print(f"{delta:6.3f}  {r.value:14.6f}  {closed_form_identity_Idelta(delta):14.6f}  "
          f"{delta * r.value:10.6f}")
print("4 pi =", 4 * math.pi)

# the power trick on a perturbed map
f = family_perturbed(1, 0.3, 5, 1024)
for delta in (1.0, 0.5, 0.1):
    plan = threshold_plan(delta)
    rep = check_energy_comparison(refine_for_power(f, plan.n), delta)
    print(f"delta={delta}: n={plan.n:2d}  I_sqrt3(f^n)={rep.I_sqrt3_g:9.4f}  "
          f"I_delta(f)={rep.I_delta_f.value:9.4f}  inclusion violations={rep.node_violations}")
