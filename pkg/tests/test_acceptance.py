"""Acceptance criteria 1-10.

Each test prints one ``[criterion k] PASS|FAIL`` line with the measured
quantities, then asserts.  Run with ``pytest tests/test_acceptance.py -v``.
"""

import json
import math
import time

import numpy as np
import pytest

from circdeg.circle_map import family_identity, family_power
from circdeg.cli import run
from circdeg.degree import check_power_identity
from circdeg.energy import (closed_form_identity_Ep, closed_form_identity_Idelta, energy_p,
                            threshold_energy)
from circdeg.powers import C5, SQRT3, build_weights, check_separation_implication, threshold_plan
from circdeg.report import ScanConfig
from circdeg.verify import (COMPARISON_DELTAS, STANDARD_SUITE, chord_power_violations,
                            check_energy_comparison, refine_for_power, scan,
                            weighted_kernel_constant)

FOUR_PI = 4.0 * math.pi
FOUR_PI2 = 4.0 * math.pi ** 2
DELTAS = (0.01, 0.1, 0.5, 1.0, SQRT3)


@pytest.fixture
def report(capsys):
    def emit(k, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {k}] {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return emit


def rel(a, b):
    return abs(a - b) / abs(b)


def test_criterion_01_closed_form_oracles(report):
    t0 = time.perf_counter()
    e_id = energy_p(family_identity(2048), 2.0).value
    runtime = time.perf_counter() - t0
    errs = {"E2(id)": rel(e_id, FOUR_PI2)}
    for d in range(1, 6):
        errs[f"E2(z^{d})"] = rel(energy_p(family_power(d, 2048), 2.0).value, FOUR_PI2 * d)
    f = family_identity(2048)
    for delta in DELTAS:
        errs[f"I_{delta:.4g}(id)"] = rel(threshold_energy(f, delta).value,
                                        closed_form_identity_Idelta(delta))
    worst = max(errs, key=errs.get)
    ok = errs[worst] <= 0.01 and runtime < 10
    assert report(1, ok, f"max rel err {errs[worst]:.2e} ({worst}) <= 1%; "
                         f"E2(id) at N=2048 in {runtime:.2f}s")


def test_criterion_02_endpoint_limit(report):
    p = 1.001
    scaled = (p - 1) * energy_p(family_identity(2048), p).value
    closed = (p - 1) * closed_form_identity_Ep(p)
    in_band = FOUR_PI * 0.99 <= scaled <= FOUR_PI * 1.01
    agree = rel(scaled, closed)
    ok = in_band and agree <= 0.005
    assert report(2, ok, f"(p-1)E_p(id) = {scaled:.6f} in [{FOUR_PI * 0.99:.4f}, "
                         f"{FOUR_PI * 1.01:.4f}]; vs Gamma closed form {agree:.2e} <= 0.5%")


def test_criterion_03_small_threshold_limit(report):
    f = family_identity(2048)
    worst = 0.0
    for delta in (0.001,) + DELTAS:
        target = FOUR_PI * math.sqrt(1 - delta ** 2 / 4)
        worst = max(worst, rel(delta * threshold_energy(f, delta).value, target))
    ok = worst <= 0.02
    assert report(3, ok, f"max |delta I_delta(id) / (4 pi sqrt(1 - delta^2/4)) - 1| = "
                         f"{worst:.2e} <= 2% over delta in {{0.001, ..., sqrt3}}")


def test_criterion_04_power_identity(report):
    failures, checks = [], 0
    for fam in STANDARD_SUITE:
        base = fam.build(1024)
        for k in range(1, 21):
            checks += 1
            if not check_power_identity(refine_for_power(base, k), k):
                failures.append((fam.label, k))
    ok = not failures
    assert report(4, ok, f"{checks} (family, k) pairs, k = 1..20, failures = {failures}")


def test_criterion_05_threshold_inclusion(report):
    counter = {d: len(check_separation_implication(threshold_plan(d), 100_000))
               for d in (1e-3, 1e-2, 0.1, 0.5, 1.0, SQRT3)}
    n01, n_sqrt3 = threshold_plan(0.1).n, threshold_plan(SQRT3).n
    grid = np.linspace(SQRT3 / 1000, SQRT3, 1000)
    bound_ok = all(1.0 / threshold_plan(float(d)).n <= C5 * d for d in grid)
    ok = not any(counter.values()) and n01 == 20 and n_sqrt3 == 1 and bound_ok
    assert report(5, ok, f"counterexamples {sum(counter.values())} on 10^5 grids; "
                         f"n(0.1)={n01}, n(sqrt3)={n_sqrt3}; 1/n <= (2/sqrt3) delta on 1000 "
                         f"deltas: {bound_ok}")


def test_criterion_06_weighted_powers(report):
    consts, moments_ok = [], True
    for p in (1.001, 1.01, 1.1, 1.25, 1.5):
        ws = build_weights(p, min(1e-6, 1e-3 * (p - 1)))
        consts.append(weighted_kernel_constant(ws, 720))
        moments_ok &= 0.0 <= 1.0 - ws.first_moment + 1e-12 and 1.0 - ws.first_moment <= ws.moment_tail
    spread = max(consts) / min(consts)
    ok = all(map(math.isfinite, consts)) and spread <= 3.0 and moments_ok
    assert report(6, ok, "sup upper/((p-1)|z-w|^p) = " + ", ".join(f"{c:.3f}" for c in consts)
                  + f"; spread {spread:.3f} <= 3; first moment within tail: {moments_ok}")


def test_criterion_07_energy_comparison(report):
    bad, count = [], 0
    for fam in STANDARD_SUITE:
        for delta in COMPARISON_DELTAS:
            count += 1
            f = refine_for_power(fam.build(1024), threshold_plan(delta).n)
            rep = check_energy_comparison(f, delta)
            if not rep.holds:
                bad.append((fam.label, delta, rep.node_violations))
    ok = not bad
    assert report(7, ok, f"{count} (family, delta) cases on shared meshes, violations = {bad}")


def test_criterion_08_chord_bound(report):
    counts = {p: chord_power_violations(p, 10_000) for p in (1.1, 1.5, 2.0)}
    ok = not any(counts.values())
    assert report(8, ok, f"violations of |z-w|^2 <= 2^(2-p)|z-w|^p on 10^4 pairs: {counts}")


def test_criterion_09_theorem_boundedness(report):
    p_grid = tuple(1 + 2.0 ** -j for j in range(1, 11))
    d_grid = (SQRT3, 1.0, 0.5, 0.1, 0.03, 0.01, 0.003, 0.001)
    op51 = scan(ScanConfig(STANDARD_SUITE, "op51", p_grid=p_grid, grid_size=1024), workers=4)
    op53 = scan(ScanConfig(STANDARD_SUITE, "op53", delta_grid=d_grid, grid_size=1024), workers=4)
    errors = [r for r in op51.rows + op53.rows if r.notes.startswith("error")]

    def identity_ratio(rep, param):
        return next(r.ratio for r in rep.rows
                    if r.family.label == "power:d=1" and r.param == param)

    lim51 = identity_ratio(op51, p_grid[-1])
    lim53 = identity_ratio(op53, d_grid[-1])
    target = 1 / FOUR_PI
    ok = (not errors and op51.sup_ratio < 1.0 and op53.sup_ratio < 1.0
          and rel(lim51, target) <= 0.02 and rel(lim53, target) <= 0.02)
    assert report(9, ok, f"sup op51 = {op51.sup_ratio:.6f}, sup op53 = {op53.sup_ratio:.6f} "
                         f"(< 1); identity at p=1+2^-10: {lim51:.6f}, at delta=1e-3: "
                         f"{lim53:.6f} vs 1/(4 pi) = {target:.6f}; row errors {len(errors)}")


def test_criterion_10_determinism(report, tmp_path):
    cfg = {"families": ["power:d=1", "power:d=3", "perturbed:d=2,eps=0.5,m=3",
                        "blaschke:a=0.9"],
           "regime": "op53", "delta_grid": [1.0, 0.1], "N": 512}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    outputs = []
    for fmt in ("csv", "json"):
        path.write_text(json.dumps(dict(cfg, format=fmt)))
        for workers in (1, 4, 1, 4):
            out = tmp_path / f"out.{fmt}"
            assert run(["scan", "--config", str(path), "--out", str(out),
                        "--workers", str(workers)]) == 0
            outputs.append((fmt, out.read_bytes()))
    csv_same = len({b for f, b in outputs if f == "csv"}) == 1
    json_same = len({b for f, b in outputs if f == "json"}) == 1
    ok = csv_same and json_same
    assert report(10, ok, f"4 runs each (workers 1 and 4): CSV identical {csv_same}, "
                          f"JSON identical {json_same}")
