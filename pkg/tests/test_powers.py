import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circdeg.circle_map import UnitPoint
from circdeg.errors import InvalidExponent, InvalidThreshold
from circdeg.powers import (ALPHA0, C5, SQRT3, build_weights, check_separation_implication,
                            threshold_plan, weighted_kernel, weighted_kernel_profile,
                            zeta_partial)
from circdeg.verify import weighted_kernel_constant

from oracles import brute_zeta

# mpmath, 30 digits
ZETA_15 = 2.61237534868548834
INV_ZETA_15 = 0.382793383999426562
ZETA_2 = 1.64493406684822644
ALPHA_01 = 0.100041713611540029


def test_zeta_examples():
    value, err = zeta_partial(2.0, 1e-10)
    assert value == pytest.approx(math.pi ** 2 / 6, abs=1e-10)
    assert value == pytest.approx(ZETA_2, abs=1e-10)
    assert err <= 1e-10
    assert zeta_partial(1.001)[0] >= 1000.0
    assert zeta_partial(1.5)[0] == pytest.approx(ZETA_15, abs=1e-11)


@pytest.mark.parametrize("p", [1.001, 1.01, 1.1, 1.5, 2.0, 3.0])
def test_zeta_error_bound_is_honest(p):
    value, err = zeta_partial(p, 1e-9)
    assert abs(value - float(mpmath.zeta(p))) <= err + 1e-13


def test_zeta_against_brute_partial_sum():
    # independent oracle: large partial sum plus integral tail, error below m^{-p}
    m = 2_000_000
    assert zeta_partial(1.5)[0] == pytest.approx(brute_zeta(1.5, m), abs=2 * m ** -1.5)


def test_zeta_domain():
    with pytest.raises(InvalidExponent):
        zeta_partial(1.0)


def test_weights_example():
    ws = build_weights(1.5, 1e-6)
    assert ws.weights[0] == pytest.approx(INV_ZETA_15, rel=1e-11)
    assert ws.weights[0] == pytest.approx(1 / 2.612375, rel=1e-6)
    with pytest.raises(InvalidExponent):
        build_weights(2.0)
    with pytest.raises(InvalidExponent):
        build_weights(1.0)


@pytest.mark.parametrize("p", [1.001, 1.01, 1.1, 1.25, 1.5])
@pytest.mark.parametrize("tail_tol", [1e-3, 1e-6])
def test_weight_scheme_invariants(p, tail_tol):
    ws = build_weights(p, tail_tol)
    assert np.all(ws.weights > 0)
    assert np.all(np.diff(ws.weights) < 0)
    # K is the smallest admissible truncation
    assert 4 * (p - 1) * ws.K ** -p <= tail_tol
    assert ws.K == 1 or 4 * (p - 1) * (ws.K - 1) ** -p > tail_tol
    assert ws.tail_bound <= 4 * (p - 1) * ws.K ** -p
    # the certified tail really covers the dropped weights
    dropped = 4 * float(mpmath.zeta(p + 1, ws.K + 1) / mpmath.zeta(p))
    assert dropped <= ws.tail_bound
    gap = 1.0 - ws.first_moment
    assert -1e-12 <= gap <= ws.moment_tail


def test_weighted_kernel_examples():
    ws = build_weights(1.2, 1e-4)
    z = UnitPoint(0.7)
    value, upper = weighted_kernel(ws, z, z)
    assert value == 0.0 and upper == ws.tail_bound
    value, upper = weighted_kernel(ws, UnitPoint(0.0), UnitPoint(math.pi))
    odd = ws.weights[0::2]
    assert value == pytest.approx(4 * math.fsum(odd), rel=1e-12)


def test_weighted_kernel_matches_complex_powers():
    ws = build_weights(1.25, 1e-3)
    z, w = UnitPoint(0.3), UnitPoint(1.9)
    k = np.arange(1, ws.K + 1)
    direct = np.abs(np.exp(1j * k * z.angle) - np.exp(1j * k * w.angle)) ** 2
    assert weighted_kernel(ws, z, w)[0] == pytest.approx(float(direct @ ws.weights), rel=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(1.001, 1.5))
def test_weighted_kernel_upper(za, wa, p):
    ws = build_weights(p, 1e-3)
    value, upper = weighted_kernel(ws, UnitPoint(za), UnitPoint(wa))
    assert 0 <= value <= upper
    assert upper - value <= 1e-3


def test_weighted_kernel_constant_is_stable():
    # the bound being checked is proportional to p - 1, so the certified tail must be too
    ps = [1 + 10.0 ** -j for j in range(1, 7)] + [1.25, 1.5]
    consts = [weighted_kernel_constant(build_weights(p, 1e-3 * (p - 1))) for p in ps]
    assert all(math.isfinite(c) and c > 0 for c in consts)
    assert max(consts) / min(consts) <= 3.0


def test_weighted_kernel_profile_shape():
    ws = build_weights(1.5, 1e-3)
    out = weighted_kernel_profile(ws, np.linspace(0, math.pi, 11))
    assert out.shape == (11,) and out[0] == 0.0


def test_threshold_plan_examples():
    plan = threshold_plan(SQRT3)
    assert plan.n == 1 and plan.alpha == ALPHA0
    plan = threshold_plan(0.1)
    assert plan.alpha == pytest.approx(ALPHA_01, rel=1e-14)
    assert ALPHA0 / plan.alpha == pytest.approx(20.935, abs=1e-3)
    assert plan.n == 20
    assert 1 / plan.n == 0.05 <= C5 * 0.1
    assert C5 * 0.1 == pytest.approx(0.11547, abs=1e-5)


def test_threshold_plan_domain():
    for d in (0.0, -0.1, 1.8, math.nan):
        with pytest.raises(InvalidThreshold):
            threshold_plan(d)


def test_alpha0_chord_is_sqrt3():
    assert 2 * math.sin(ALPHA0 / 2) == pytest.approx(SQRT3, abs=1e-15)


def test_plan_invariants_on_dense_grid():
    deltas = np.linspace(1e-4, SQRT3, 5000)
    ns = []
    for d in deltas:
        plan = threshold_plan(float(d))
        assert plan.n >= 1 and plan.n * plan.alpha <= ALPHA0 * (1 + 1e-15)
        assert 1 / plan.n <= plan.inv_n_bound * (1 + 1e-15)
        assert plan.inv_n_bound <= C5 * d * (1 + 1e-15)
        assert plan.alpha / d <= 2 * math.pi / (3 * SQRT3) * (1 + 1e-15)
        ns.append(plan.n)
    assert np.all(np.diff(ns) <= 0)


@pytest.mark.parametrize("delta", [SQRT3, 0.1, 0.5])
def test_separation_examples(delta):
    assert check_separation_implication(threshold_plan(delta), 100_000) == []


def test_separation_grid_precondition():
    with pytest.raises(ValueError):
        check_separation_implication(threshold_plan(0.5), 999)


def test_separation_detects_a_wrong_power():
    # using n + 2 instead of the planned n must produce counterexamples
    plan = threshold_plan(0.1)
    bad = type(plan)(plan.delta, plan.alpha, plan.n + 2, plan.inv_n_bound)
    assert check_separation_implication(bad, 10_000)
