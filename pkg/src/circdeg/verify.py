"""End-to-end numerical checks of the degree estimates and constant-estimation sweeps.

Every ratio reported here is ``|deg f|`` divided by the right-hand side of
one of the degree inequalities (without its constant), so the supremum
of a family of ratios is an empirical lower bound for any admissible
universal constant.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from .circle_map import (CircleMap, family_blaschke, family_constant, family_perturbed,
                         family_power, pow_map, refine)
from .degree import degree
from .energy import (DEFAULT_TOL, EnergyResult, OuterMesh, energy_p, pair_chords,
                     threshold_energy, threshold_energy_on_mesh)
from .errors import CircDegError, InvalidExponent, InvalidThreshold
from .powers import (SQRT3, build_weights, check_separation_implication, threshold_plan,
                     weighted_kernel_profile)

__all__ = [
    "FamilySpec",
    "RatioRecord",
    "ScanReport",
    "SmallPChainReport",
    "ComparisonReport",
    "STANDARD_SUITE",
    "FAST_SUITE",
    "HHALF_CONSTANT",
    "ratio_hhalf",
    "ratio_op51",
    "ratio_op53",
    "check_small_p_chain",
    "check_energy_comparison",
    "refine_for_power",
    "weighted_kernel_constant",
    "scan",
    "config_digest",
    "CheckResult",
    "chord_power_violations",
    "lemma_checks",
    "oracle_selftest",
]

# |deg g| <= E_2(g) / (4 pi^2), with equality for z -> z^d
HHALF_CONSTANT = 1.0 / (4.0 * math.pi ** 2)

_FAMILY_PARAMS = {
    "constant": (),
    "identity": (),
    "power": ("d",),
    "perturbed": ("d", "eps", "m"),
    "blaschke": ("a", "angle"),
}
_INT_PARAMS = {"d", "m"}
_DEFAULTS = {"blaschke": {"angle": 0.0}}


def _fmt(x):
    if isinstance(x, int):
        return str(x)
    return format(x, ".12g")


@dataclass(frozen=True, order=True)
class FamilySpec:
    """A parametric map family: ``tag`` plus numeric parameters, e.g. ``power:d=3``."""

    tag: str
    params: tuple = ()

    @classmethod
    def parse(cls, text: str) -> "FamilySpec":
        tag, _, rest = text.strip().partition(":")
        tag = tag.strip()
        if tag not in _FAMILY_PARAMS:
            raise ValueError(f"unknown family {tag!r}; known: {', '.join(sorted(_FAMILY_PARAMS))}")
        values = dict(_DEFAULTS.get(tag, {}))
        for item in rest.replace(";", ",").split(","):
            if not item.strip():
                continue
            key, eq, val = item.partition("=")
            key = key.strip()
            if not eq or key not in _FAMILY_PARAMS[tag]:
                raise ValueError(f"bad parameter {item.strip()!r} for family {tag!r}")
            values[key] = int(val) if key in _INT_PARAMS else float(val)
        missing = [k for k in _FAMILY_PARAMS[tag] if k not in values]
        if missing:
            raise ValueError(f"family {tag!r} is missing {', '.join(missing)}")
        return cls(tag, tuple((k, values[k]) for k in _FAMILY_PARAMS[tag]))

    @property
    def params_text(self) -> str:
        return ";".join(f"{k}={_fmt(v)}" for k, v in self.params)

    @property
    def label(self) -> str:
        body = ",".join(f"{k}={_fmt(v)}" for k, v in self.params)
        return f"{self.tag}:{body}" if body else self.tag

    def build(self, n: int) -> CircleMap:
        p = dict(self.params)
        if self.tag == "constant":
            return family_constant(n)
        if self.tag == "identity":
            return family_power(1, n)
        if self.tag == "power":
            return family_power(p["d"], n)
        if self.tag == "perturbed":
            return family_perturbed(p["d"], p["eps"], p["m"], n)
        return family_blaschke(p["a"], p["angle"], n)


STANDARD_SUITE = tuple(FamilySpec.parse(s) for s in (
    "constant",
    "power:d=1", "power:d=2", "power:d=3", "power:d=4", "power:d=5",
    "perturbed:d=1,eps=0.3,m=5", "perturbed:d=2,eps=0.5,m=3", "perturbed:d=-1,eps=0.8,m=2",
    "blaschke:a=0.5", "blaschke:a=0.9", "blaschke:a=0.95",
))
FAST_SUITE = tuple(FamilySpec.parse(s) for s in (
    "constant", "power:d=1", "power:d=2", "perturbed:d=1,eps=0.3,m=5", "blaschke:a=0.5",
))


@dataclass(frozen=True)
class RatioRecord:
    family: Optional[FamilySpec]
    regime: str
    param: Optional[float]
    degree: int
    energy: Optional[EnergyResult]
    ratio: float
    notes: str = ""

    def sort_key(self):
        label = self.family.label if self.family else ""
        return (label, self.regime, -math.inf if self.param is None else self.param)


def _ratio(deg, denominator):
    if deg == 0:
        return 0.0
    return abs(deg) / denominator


def ratio_hhalf(f: CircleMap, tol: float = DEFAULT_TOL, family=None) -> RatioRecord:
    """``|deg f| / E_2(f)``; constant maps give 0 rather than 0/0."""
    d = degree(f).degree
    e = energy_p(f, 2.0, tol)
    return RatioRecord(family, "hhalf", None, d, e, _ratio(d, e.value))


def ratio_op51(f: CircleMap, p: float, tol: float = DEFAULT_TOL, family=None) -> RatioRecord:
    """``|deg f| / ((p-1) E_p(f))``, bounded uniformly as ``p -> 1``."""
    d = degree(f).degree
    e = energy_p(f, p, tol)
    return RatioRecord(family, "op51", p, d, e, _ratio(d, (p - 1.0) * e.value))


def ratio_op53(f: CircleMap, delta: float, tol: float = DEFAULT_TOL, family=None) -> RatioRecord:
    """``|deg f| / (delta I_delta(f))``, bounded uniformly as ``delta -> 0``."""
    if not 0.0 < delta <= SQRT3:
        raise InvalidThreshold(f"delta={delta!r} must lie in (0, sqrt(3)]")
    d = degree(f).degree
    e = threshold_energy(f, delta, tol)
    return RatioRecord(family, "op53", delta, d, e, _ratio(d, delta * e.value))


def refine_for_power(f: CircleMap, k: int) -> CircleMap:
    """Refine ``f`` (exactly, see ``refine``) until ``pow_map(f, k)`` is admissible."""
    limit = math.pi * (1.0 - f.margin)
    need = k * f.max_step
    if need < limit:
        return f
    return refine(f, math.floor(need / limit) + 1)


def weighted_kernel_constant(ws, grid: int = 720) -> float:
    """Empirical sup of the certified weighted kernel over ``(p-1)|z-w|^p`` on an angle grid."""
    gap = 2.0 * np.pi * np.arange(1, grid) / grid
    upper = weighted_kernel_profile(ws, gap) + ws.tail_bound
    rho = 2.0 * np.abs(np.sin(0.5 * gap))
    return float(np.max(upper / ((ws.p - 1.0) * rho ** ws.p)))


@dataclass
class SmallPChainReport:
    p: float
    degree: int
    k_small: int
    weights: np.ndarray
    energies_k: list
    per_k_ok: list
    moment_head: float
    aggregate_head: float
    energy_p: float
    c2: float
    degree_bound_from_aggregate: float
    degree_bound_from_energy: float

    @property
    def ok(self) -> bool:
        return (all(self.per_k_ok)
                and abs(self.degree) <= self.degree_bound_from_aggregate
                and self.aggregate_head <= self.c2 * (self.p - 1.0) * self.energy_p
                and abs(self.degree) <= self.degree_bound_from_energy)

    @property
    def chain_slack(self) -> float:
        """``aggregate / (C2 (p-1) E_p)``; at most 1 when the pointwise lemma integrates correctly."""
        rhs = self.c2 * (self.p - 1.0) * self.energy_p
        return 0.0 if rhs == 0.0 else self.aggregate_head / rhs


def check_small_p_chain(f: CircleMap, p: float, tol: float = DEFAULT_TOL,
                        k_small: int = 16, calibration: float = 1e-3,
                        tail_tol: float = 1e-4) -> SmallPChainReport:
    """Replay the averaging-over-powers argument on a concrete map.

    For ``k <= k_small`` it evaluates ``E_2(f^k)`` and checks
    ``k |deg f| <= R E_2(f^k)`` with ``R = (1 + calibration)/(4 pi^2)``.
    The weighted aggregate ``sum a_k E_2(f^k)`` is then compared with
    ``C2 (p-1) E_p(f)``, ``C2`` being the empirical weighted-kernel
    constant at this ``p``.  Raises ``JumpTooLarge`` if ``f^k_small`` is
    not resolved; call ``refine_for_power`` first.
    """
    if not 1.0 < p <= 1.5:
        raise InvalidExponent(f"small-p chain needs 1 < p <= 3/2, got {p!r}")
    ws = build_weights(p, tail_tol)
    c2 = weighted_kernel_constant(ws)
    pow_map(f, k_small)  # fail fast if the highest power is unresolved
    deg = degree(f).degree
    r = HHALF_CONSTANT * (1.0 + calibration)
    a = ws.weights[:k_small]
    energies, ok = [], []
    for k in range(1, k_small + 1):
        e2 = energy_p(pow_map(f, k), 2.0, tol).value
        energies.append(e2)
        ok.append(k * abs(deg) <= r * e2)
    ks = np.arange(1, k_small + 1)
    moment = math.fsum(a * ks)
    aggregate = math.fsum(a * np.array(energies))
    ep = energy_p(f, p, tol).value
    return SmallPChainReport(
        p=p, degree=deg, k_small=k_small, weights=a, energies_k=energies, per_k_ok=ok,
        moment_head=moment, aggregate_head=aggregate, energy_p=ep, c2=c2,
        degree_bound_from_aggregate=r * aggregate / moment,
        degree_bound_from_energy=r * c2 * (p - 1.0) * ep / moment,
    )


@dataclass
class ComparisonReport:
    delta: float
    n: int
    degree_f: int
    degree_g: int
    I_delta_f: EnergyResult
    I_sqrt3_g: float
    node_violations: int
    mesh: Optional[OuterMesh]

    @property
    def degree_ok(self) -> bool:
        return self.degree_g == self.n * self.degree_f

    @property
    def holds(self) -> bool:
        slack = 1e-12 * max(1.0, self.I_delta_f.value)
        return (self.degree_ok and self.node_violations == 0
                and self.I_sqrt3_g <= self.I_delta_f.value + slack)


def check_energy_comparison(f: CircleMap, delta: float,
                            tol: float = DEFAULT_TOL) -> ComparisonReport:
    """Compare ``I_sqrt3(f^n)`` with ``I_delta(f)`` on one shared outer mesh.

    The mesh is the converged mesh of ``I_delta(f)``; it starts at the
    exclusion radius of ``f``, which is never larger than that of ``f^n``.
    Besides the two integrals, every mesh node is checked for the
    pointwise inclusion ``|g(x)-g(y)| >= sqrt3  =>  |f(x)-f(y)| >= delta``.
    """
    plan = threshold_plan(delta)
    g = pow_map(f, plan.n)
    dg, df = degree(g).degree, degree(f).degree
    i_f = threshold_energy(f, delta, tol)
    if i_f.mesh is None:
        i_g = threshold_energy(g, SQRT3, tol).value if g.max_step else 0.0
        return ComparisonReport(delta, plan.n, df, dg, i_f, i_g, 0, None)
    i_g = threshold_energy_on_mesh(g, SQRT3, i_f.mesh)
    edges = i_f.mesh.edges
    mids = 0.5 * (edges[:-1] + edges[1:])
    violations = 0
    step = max(1, (1 << 21) // f.grid_size)
    for lo in range(0, mids.size, step):
        u = mids[lo:lo + step]
        violations += int(np.count_nonzero((pair_chords(g, u) >= SQRT3)
                                           & (pair_chords(f, u) < delta)))
    return ComparisonReport(delta, plan.n, df, dg, i_f, i_g, violations, i_f.mesh)


@dataclass
class ScanReport:
    rows: list
    sup_ratio: float
    config_digest: str
    tool_version: str = __version__


def config_digest(config) -> str:
    payload = {
        "families": [fs.label for fs in config.families],
        "regime": config.regime,
        "p_grid": [_fmt(float(x)) for x in config.p_grid],
        "delta_grid": [_fmt(float(x)) for x in config.delta_grid],
        "N": config.grid_size,
        "tol": _fmt(float(config.tol)),
        "tool_version": __version__,
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def _tasks(config):
    tasks = []
    for fam in config.families:
        if config.regime == "hhalf":
            tasks.append((fam, "hhalf", None))
        elif config.regime == "op51":
            tasks.extend((fam, "op51", p) for p in config.p_grid)
        elif config.regime == "op53":
            tasks.extend((fam, "op53", d) for d in config.delta_grid)
        elif config.regime == "lemmas":
            tasks.extend((fam, "comparison", d) for d in config.delta_grid)
            tasks.extend((fam, "small_p", p) for p in config.p_grid)
        else:
            raise ValueError(f"unknown regime {config.regime!r}")
    return tasks


def _run_task(task, n, tol):
    fam, regime, param = task
    try:
        f = fam.build(n)
        if regime == "hhalf":
            return ratio_hhalf(f, tol, fam)
        if regime == "op51":
            return ratio_op51(f, param, tol, fam)
        if regime == "op53":
            return ratio_op53(f, param, tol, fam)
        if regime == "comparison":
            plan = threshold_plan(param)
            fine = refine_for_power(f, plan.n)
            rep = check_energy_comparison(fine, param, tol)
            ratio = 0.0 if rep.I_delta_f.value == 0 else rep.I_sqrt3_g / rep.I_delta_f.value
            notes = f"n={rep.n};violations={rep.node_violations};holds={rep.holds}"
            if fine is not f:
                notes += f";refined_N={fine.grid_size}"
            return RatioRecord(fam, regime, param, rep.degree_f, rep.I_delta_f, ratio, notes)
        fine = refine_for_power(f, 16)
        rep = check_small_p_chain(fine, param, tol)
        energy = EnergyResult(rep.energy_p, 0.0, "graded", fine.grid_size, 0)
        notes = f"aggregate={_fmt(rep.aggregate_head)};c2={_fmt(rep.c2)};ok={rep.ok}"
        if fine is not f:
            notes += f";refined_N={fine.grid_size}"
        return RatioRecord(fam, regime, param, rep.degree, energy, rep.chain_slack, notes)
    except CircDegError as exc:
        return RatioRecord(fam, regime, param, 0, None, math.nan,
                           f"error:{type(exc).__name__}:{exc}")


def scan(config, workers: int = 1) -> ScanReport:
    """Evaluate the configured ratio over families x grid.

    Rows are independent and may run on a thread pool; the report is
    assembled in sorted order, so it does not depend on scheduling.
    Per-row failures land in ``notes`` and never abort the scan.
    """
    tasks = _tasks(config)
    run = lambda t: _run_task(t, config.grid_size, config.tol)  # noqa: E731
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run, tasks))
    else:
        rows = [run(t) for t in tasks]
    rows.sort(key=RatioRecord.sort_key)
    finite = [r.ratio for r in rows if math.isfinite(r.ratio)]
    return ScanReport(rows, max(finite, default=0.0), config_digest(config))


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


SEPARATION_DELTAS = (1e-3, 1e-2, 0.1, 0.5, 1.0, SQRT3)
WEIGHT_PS = (1.001, 1.01, 1.1, 1.25, 1.5)
COMPARISON_DELTAS = (0.1, 0.5, 1.0)


def chord_power_violations(p: float, pairs: int = 10_000) -> int:
    """Pairs on a ``100 x 100`` angle grid violating ``|z-w|^2 <= 2^{2-p} |z-w|^p``."""
    side = int(round(math.sqrt(pairs)))
    z = 2.0 * np.pi * np.arange(side) / side
    w = z + np.pi / side
    rho = 2.0 * np.abs(np.sin(0.5 * (z[:, None] - w[None, :])))
    lhs = rho ** 2
    rhs = 2.0 ** (2.0 - p) * rho ** p
    return int(np.count_nonzero(lhs > rhs * (1.0 + 1e-14)))


def lemma_checks(suite=STANDARD_SUITE, n: int = 1024, tol: float = DEFAULT_TOL):
    """Numerical forms of the power-trick lemmas; every result should pass."""
    results = []
    for d in SEPARATION_DELTAS:
        plan = threshold_plan(d)
        bad = check_separation_implication(plan, 100_000)
        results.append(CheckResult(f"separation delta={_fmt(d)}", not bad,
                                   f"n={plan.n}, counterexamples={len(bad)}"))

    consts, moments_ok = [], True
    for p in WEIGHT_PS:
        ws = build_weights(p, min(1e-6, 1e-3 * (p - 1.0)))
        consts.append(weighted_kernel_constant(ws))
        gap = 1.0 - ws.first_moment
        moments_ok &= -1e-12 <= gap <= ws.moment_tail
    spread = max(consts) / min(consts)
    results.append(CheckResult(
        "weighted kernel constant", all(map(math.isfinite, consts)) and spread <= 3.0,
        "sup per p: " + ", ".join(_fmt(c) for c in consts) + f"; spread={spread:.3f}"))
    results.append(CheckResult("weights first moment within certified tail", moments_ok, ""))

    for p in (1.1, 1.5, 2.0):
        bad = chord_power_violations(p)
        results.append(CheckResult(f"chord power bound p={_fmt(p)}", bad == 0, f"violations={bad}"))

    for fam in suite:
        for d in COMPARISON_DELTAS:
            name = f"energy comparison {fam.label} delta={_fmt(d)}"
            try:
                f = refine_for_power(fam.build(n), threshold_plan(d).n)
                rep = check_energy_comparison(f, d, tol)
            except CircDegError as exc:
                results.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
                continue
            results.append(CheckResult(
                name, rep.holds,
                f"n={rep.n}, I_sqrt3(g)={_fmt(rep.I_sqrt3_g)}, "
                f"I_delta(f)={_fmt(rep.I_delta_f.value)}, node_violations={rep.node_violations}"))
    return results


def oracle_selftest(n: int = 2048, tol: float = DEFAULT_TOL) -> dict:
    """Relative errors of the quadratures against every closed form, keyed by case."""
    from .energy import (closed_form_identity_E2, closed_form_identity_Ep,
                         closed_form_identity_Idelta, energy_p_oracle)

    ident = family_power(1, n)
    errors = {}
    for d in range(1, 6):
        exact = closed_form_identity_E2(d)
        got = energy_p(family_power(d, n), 2.0, tol).value
        errors[f"E_2 power d={d}"] = abs(got - exact) / exact
    for p in (1.001, 1.1, 1.25, 1.5, 2.0):
        exact = closed_form_identity_Ep(p)
        errors[f"E_p identity p={_fmt(p)}"] = abs(energy_p(ident, p, tol).value - exact) / exact
    for d in (0.01, 0.1, 0.5, 1.0, SQRT3):
        exact = closed_form_identity_Idelta(d)
        got = threshold_energy(ident, d, tol).value
        errors[f"I_delta identity delta={_fmt(d)}"] = abs(got - exact) / exact
    exact = closed_form_identity_E2(1)
    errors["tensor oracle E_2 identity"] = abs(energy_p_oracle(ident, 2.0, min(n, 2048)).value
                                                - exact) / exact
    return errors
