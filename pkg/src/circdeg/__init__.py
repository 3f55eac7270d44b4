"""Numerical laboratory for degree estimates of circle-valued maps.

Maps ``S^1 -> S^1`` are stored as sampled phase lifts; the package computes
their degree, the fractional energy ``E_p``, the threshold functional
``I_delta``, the power-trick constructions behind the sharpened estimates,
and sweeps that estimate the universal constants as ``p -> 1`` or
``delta -> 0``.
"""

__version__ = "0.1.0"

from .circle_map import (CircleMap, UnitPoint, conjugate, family_blaschke, family_constant,
                         family_identity, family_perturbed, family_power, from_complex_samples,
                         from_phase_samples, pow_map, refine, rotate)
from .degree import DegreeResult, check_power_identity, degree
from .energy import (EnergyResult, closed_form_identity_E2, closed_form_identity_Ep,
                     closed_form_identity_Idelta, energy_p, energy_p_oracle, threshold_energy)
from .errors import (CircDegError, InvalidExponent, InvalidThreshold, JumpTooLarge,
                     NoConvergence, NonIntegerWinding)
from .powers import (ThresholdPlan, WeightScheme, build_weights, check_separation_implication,
                     threshold_plan, weighted_kernel, zeta_partial)
