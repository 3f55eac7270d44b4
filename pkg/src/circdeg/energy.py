"""Double-integral functionals of circle maps.

Both functionals have the form

    F(f) = int int  phi(|f(x) - f(y)|) / |x - y|^2  dx dy

over the circle with arclength measure and chordal distance.  Writing
``y = x + u`` turns this into ``int_0^{2 pi} P(u) / (4 sin^2(u/2)) du``
where ``P(u) = int_0^{2 pi} phi(|f(s) - f(s+u)|) ds`` is smooth and periodic
in ``s``.  The inner integral is a periodic trapezoid rule on the map's
grid; the outer one runs over geometrically graded panels toward the
singular diagonal ``u = 0`` (and, by the symmetry ``P(u) = P(2 pi - u)``,
toward ``u = 2 pi``).

``phi(t) = t**p`` gives the fractional energy ``E_p``; ``phi(t) = 1{t >= delta}``
gives the threshold functional ``I_delta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .circle_map import TWO_PI, CircleMap
from .errors import InvalidExponent, InvalidThreshold, NoConvergence
from .special import gamma

__all__ = [
    "EnergyResult",
    "OuterMesh",
    "KernelGeometry",
    "chord_length",
    "pair_chords",
    "energy_p",
    "energy_p_oracle",
    "threshold_energy",
    "threshold_energy_on_mesh",
    "closed_form_identity_E2",
    "closed_form_identity_Ep",
    "closed_form_identity_Idelta",
]

DEFAULT_TOL = 1e-4
MAX_LEVELS = 14
GAUSS_ORDER = 8
# graded panels of the threshold rule start with 2**CELL_SHIFT cells each
CELL_SHIFT = 4
LIPSCHITZ_SAFETY = 2.0
_CHUNK = 1 << 22


@dataclass(frozen=True, eq=False)
class OuterMesh:
    """Cells of the outer ``u`` integral, given by increasing breakpoints in ``(0, pi]``."""

    edges: np.ndarray

    @classmethod
    def graded(cls, u_start: float, subdivision: int) -> "OuterMesh":
        """Panels ``[u_start 2^j, u_start 2^{j+1}]`` (the last clipped at pi), each cut
        into ``2**subdivision`` equal cells."""
        if u_start >= math.pi:
            return cls(np.array([math.pi]))
        n_panels = max(1, math.ceil(math.log2(math.pi / u_start)))
        edges = u_start * 2.0 ** np.arange(n_panels + 1)
        edges[-1] = math.pi
        pieces = 2 ** subdivision
        frac = np.arange(pieces) / pieces
        fine = (edges[:-1, None] + frac[None, :] * np.diff(edges)[:, None]).ravel()
        return cls(np.append(fine, math.pi))

    @property
    def cells(self) -> int:
        return self.edges.size - 1


@dataclass(frozen=True)
class EnergyResult:
    value: float
    error_estimate: float
    scheme: str
    grid_size: int
    refinement_levels: int
    mesh: Optional[OuterMesh] = None


@dataclass(frozen=True)
class KernelGeometry:
    """Chordal geometry of two points ``e^{is}``, ``e^{it}`` with ``u = s - t``."""

    u: float

    @property
    def chord(self) -> float:
        return chord_length(self.u)

    @property
    def kernel(self) -> float:
        return 4.0 * math.sin(0.5 * self.u) ** 2


def chord_length(delta_angle):
    """Euclidean distance between two unit complex numbers with angle difference ``delta_angle``."""
    return 2.0 * np.abs(np.sin(0.5 * np.asarray(delta_angle, dtype=float)))


def _kernel_integral(a, b):
    # int_a^b du / (4 sin^2(u/2)) = (cot(a/2) - cot(b/2)) / 2, written without cancellation
    return 0.5 * np.sin(0.5 * (b - a)) / (np.sin(0.5 * a) * np.sin(0.5 * b))


def pair_chords(f: CircleMap, u) -> np.ndarray:
    """Chords ``|f(s_i) - f(s_i + u_j)|`` as an array of shape ``(len(u), N)``."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    idx = np.arange(f.grid_size, dtype=float)
    shifted = f.lift_at_index(idx[None, :] + (u / f.spacing)[:, None])
    return chord_length(shifted - f.phase[None, :])


def _profile(f, u, reduce):
    """``reduce`` applied row-wise to pair chords, evaluated in memory-bounded chunks."""
    out = np.empty(u.size)
    step = max(1, _CHUNK // f.grid_size)
    for lo in range(0, u.size, step):
        out[lo:lo + step] = reduce(pair_chords(f, u[lo:lo + step]))
    return out


def _check_exponent(p):
    if not (1.0 < p <= 2.0) or not math.isfinite(p):
        raise InvalidExponent(f"exponent p={p!r} must lie in (1, 2]")


def _gauss_nodes(edges, order):
    x, w = np.polynomial.legendre.leggauss(order)
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    nodes = (a + b) * 0.5 + half * x[None, :]
    return nodes.ravel(), (half * w[None, :]).ravel()


def energy_p(f: CircleMap, p: float, tol: float = DEFAULT_TOL,
             max_levels: int = MAX_LEVELS, order: int = GAUSS_ORDER) -> EnergyResult:
    """Fractional energy ``E_p(f) = int int |f(x)-f(y)|^p / |x-y|^2``.

    The outer integral uses Gauss-Legendre on graded panels down to
    ``u_min = 2 pi / (64 N)``.  Below ``u_min`` the integrand is replaced by
    its diagonal asymptotics, which contribute
    ``2 * (int |theta'|^p ds) * u_min^(p-1) / (p-1)`` from both sides.
    Panels are halved until successive totals differ by less than
    ``tol * value``.
    """
    _check_exponent(p)
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = f.grid_size
    if f.max_step == 0.0:
        return EnergyResult(0.0, 0.0, "graded", n, 0)
    h = f.spacing
    u_min = TWO_PI / (64 * n)
    slope_moment = h * float(np.sum(np.abs(f.steps / h) ** p))
    diagonal = 2.0 * slope_moment * u_min ** (p - 1.0) / (p - 1.0)

    def reduce(chords):
        return TWO_PI * np.mean(chords ** p, axis=1)

    previous = None
    for level in range(max_levels + 1):
        mesh = OuterMesh.graded(u_min, level)
        nodes, weights = _gauss_nodes(mesh.edges, order)
        terms = weights * _profile(f, nodes, reduce) / (4.0 * np.sin(0.5 * nodes) ** 2)
        total = 2.0 * math.fsum(terms) + diagonal
        if previous is not None:
            change = abs(total - previous)
            if change <= tol * total:
                return EnergyResult(total, change, "graded", n, level, mesh)
        previous = total
    raise NoConvergence(f"energy_p did not reach tol={tol} within {max_levels} levels")


def energy_p_oracle(f: CircleMap, p: float, n_oracle: Optional[int] = None) -> EnergyResult:
    """Brute-force staggered tensor midpoint rule.

    ``s`` runs over the integer grid and ``t`` over the half-offset grid,
    so ``s - t`` never vanishes.  No diagonal correction is applied; the
    rule is only meant as an independent cross-check at moderate ``N``.
    """
    _check_exponent(p)
    m = n_oracle or f.grid_size
    h = TWO_PI / m
    s = h * np.arange(m)
    t = s + 0.5 * h
    th_s = f.lift_at(s)
    th_t = f.lift_at(t)
    total = []
    rows = max(1, _CHUNK // m)
    for lo in range(0, m, rows):
        ds = th_s[lo:lo + rows, None] - th_t[None, :]
        du = s[lo:lo + rows, None] - t[None, :]
        block = chord_length(ds) ** p / (4.0 * np.sin(0.5 * du) ** 2)
        total.append(float(np.sum(block)))
    return EnergyResult(h * h * math.fsum(total), 0.0, "tensor_oracle", m, 0)


def _check_threshold(delta, upper=2.0):
    if not (0.0 < delta <= upper) or not math.isfinite(delta):
        raise InvalidThreshold(f"threshold delta={delta!r} must lie in (0, {upper:g}]")


def exclusion_radius(f: CircleMap, delta: float) -> float:
    """Radius ``u0`` around the diagonal on which the indicator provably vanishes.

    The sampled lift is ``L``-Lipschitz, so ``|f(s) - f(s+u)| < delta``
    whenever ``L u < 2 arcsin(delta/2)``; a safety factor 2 is applied.
    """
    lip = f.lipschitz
    if lip == 0.0:
        return math.inf
    return 2.0 * math.asin(0.5 * delta) / (lip * LIPSCHITZ_SAFETY)


def _threshold_profile(f, delta, u):
    """``m(u)``: grid measure of ``{s : |f(s) - f(s+u)| >= delta}``."""
    h = f.spacing
    return _profile(f, u, lambda chords: h * np.count_nonzero(chords >= delta, axis=1))


def _threshold_pattern(f, delta, u):
    """``m(u)`` together with the per-row indicator, bit-packed to one row per ``u``."""
    h = f.spacing
    m = np.empty(u.size)
    bits = np.empty((u.size, (f.grid_size + 7) // 8), dtype=np.uint8)
    step = max(1, _CHUNK // f.grid_size)
    for lo in range(0, u.size, step):
        hit = pair_chords(f, u[lo:lo + step]) >= delta
        m[lo:lo + step] = h * np.count_nonzero(hit, axis=1)
        bits[lo:lo + step] = np.packbits(hit, axis=1)
    return m, bits


def threshold_energy_on_mesh(f: CircleMap, delta: float, mesh: OuterMesh) -> float:
    """``I_delta(f)`` by the product midpoint rule on a given outer mesh.

    Each cell contributes ``m(u_mid) * int_cell du / (4 sin^2(u/2))``.
    """
    _check_threshold(delta)
    edges = mesh.edges
    if edges.size < 2 or f.max_step == 0.0:
        return 0.0
    mids = 0.5 * (edges[:-1] + edges[1:])
    weights = _kernel_integral(edges[:-1], edges[1:])
    return 2.0 * math.fsum(weights * _threshold_profile(f, delta, mids))


def threshold_energy(f: CircleMap, delta: float, tol: float = DEFAULT_TOL,
                     max_levels: int = MAX_LEVELS,
                     u_start: Optional[float] = None) -> EnergyResult:
    """Threshold functional ``I_delta(f) = int int 1{|f(x)-f(y)| >= delta} / |x-y|^2``.

    The outer mesh starts at the exclusion radius (or at ``u_start`` if that
    is smaller) with ``2**CELL_SHIFT`` cells per graded panel.  The value is
    the product midpoint rule over the cells.  ``m(u)`` is a step function,
    so each level bisects only the cells that may still contain a jump; the
    others are settled.  A cell is settled when every grid row has the same
    indicator at both ends and the midpoint, and the cell is too narrow for
    a row to leave its state and come back between samples (the lift moves
    at most ``L u``, and a round trip must cross an arc of length
    ``min(2 alpha, 2 pi - 2 alpha)``).  Convergence needs the total to
    change by less than ``tol * value`` between levels and the midpoint and
    endpoint rules to agree on the unsettled cells to the same tolerance.
    The returned ``mesh`` holds the final cells, so another map can be
    integrated on exactly the same mesh.
    """
    _check_threshold(delta)
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = f.grid_size
    u0 = exclusion_radius(f, delta)
    if u_start is not None:
        u0 = min(u0, u_start)
    if u0 >= math.pi:
        return EnergyResult(0.0, 0.0, "graded", n, 0)
    alpha = 2.0 * math.asin(0.5 * delta)
    max_width = 2.0 * min(2.0 * alpha, TWO_PI - 2.0 * alpha) / f.lipschitz

    edges = OuterMesh.graded(u0, CELL_SHIFT).edges
    m_edges, bits_edges = _threshold_pattern(f, delta, edges)
    a, b = edges[:-1], edges[1:]
    m_a, m_b = m_edges[:-1], m_edges[1:]
    bits_a, bits_b = bits_edges[:-1], bits_edges[1:]
    settled_edges, settled_terms = [], []
    previous = None
    for level in range(max_levels + 1):
        mid = 0.5 * (a + b)
        m_mid, bits_mid = _threshold_pattern(f, delta, mid)
        weights = _kernel_integral(a, b)
        terms = weights * m_mid
        value = 2.0 * math.fsum(settled_terms + terms.tolist())
        active = ((b - a >= max_width)
                  | np.any(bits_a != bits_mid, axis=1) | np.any(bits_mid != bits_b, axis=1))
        error = 2.0 * float(np.sum(np.abs(terms - 0.5 * weights * (m_a + m_b))[active]))
        if previous is not None:
            error = max(error, abs(value - previous))
            if error <= tol * value:
                cells = np.concatenate(settled_edges + [a]) if settled_edges else a
                mesh = OuterMesh(np.append(np.sort(cells), math.pi))
                return EnergyResult(value, error, "graded", n, level, mesh)
        previous = value
        settled_edges.append(a[~active])
        settled_terms.extend(terms[~active].tolist())
        a, b, mid, m_a, m_b, m_mid = (x[active] for x in (a, b, mid, m_a, m_b, m_mid))
        bits_a, bits_b, bits_mid = (x[active] for x in (bits_a, bits_b, bits_mid))
        a, b = np.concatenate([a, mid]), np.concatenate([mid, b])
        m_a, m_b = np.concatenate([m_a, m_mid]), np.concatenate([m_mid, m_b])
        bits_a, bits_b = np.concatenate([bits_a, bits_mid]), np.concatenate([bits_mid, bits_b])
    raise NoConvergence(f"threshold_energy did not reach tol={tol} within {max_levels} levels")


def closed_form_identity_E2(d: int) -> float:
    """``E_2`` of ``z -> z**d``: the Fejer kernel integrates to ``2 pi d``."""
    if int(d) < 1:
        raise ValueError("d must be a positive integer")
    return 4.0 * math.pi ** 2 * int(d)


def closed_form_identity_Ep(p: float) -> float:
    _check_exponent(p)
    return 2.0 ** p * math.pi ** 1.5 * gamma(0.5 * (p - 1.0)) / gamma(0.5 * p)


def closed_form_identity_Idelta(delta: float) -> float:
    _check_threshold(delta)
    return 4.0 * math.pi / delta * math.sqrt(max(0.0, 1.0 - 0.25 * delta * delta))
