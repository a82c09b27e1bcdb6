"""Twisted period integrals F_mu(q) = integral of g^alpha dt over regularized cycles.

A segment cycle Xi_(ij) is realised as

    1/(c-1) * circle(x_i) + [x_i + eps u, x_j - eps u] - 1/(c-1) * circle(x_j)

with u the unit vector from x_i to x_j and both circles run counter-clockwise
from the truncated segment's endpoints.  The circle at x_i and the segment
both start from the section value at x_i + eps u; the circle at x_j starts
from the branch reached at the end of the segment.  With this assignment
the sum does not depend on eps.

A period cycle Xi_wk is the cut-domain loop from the basepoint t* to
t* + w_k carrying the section's branch at t*.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import gk
from .chains import J, canonical_index, segment_endpoints
from .errors import EpsilonTooLarge, QuadratureFailure
from .kernel import Lattice
from .local_system import (
    AlphaParam,
    BranchState,
    Configuration,
    abelian_integral_I,
    check_clearance,
    g_value,
    lattice_translates,
    monodromy_log_increment,
    period_loop,
    piece_breaks,
    section_log,
    snap_log,
)
from .paths import CurvePath, Segment

DEFAULT_TOL = 1e-10
DEFAULT_EPSILON = 0.02
STEP_LIMIT = 0.75

DEFAULT_THRESHOLDS = {
    "legendre": 1e-12,
    "I": 1e-10,
    "monodromy": 1e-8,
    "ellipticity": 1e-10,
    "eps_independence": 1e-8,
    "relation": 1e-6,
    "vanishing_ratio": 0.2,
}


@dataclass(frozen=True)
class CyclePiece:
    path: CurvePath
    weight: complex
    # None: start from the cycle's branch; k: start where piece k ended
    start_from: int | None = None


@dataclass(frozen=True)
class RegularizedCycle:
    kind: str
    index: str
    epsilon: float | None
    pieces: tuple
    branch: BranchState
    q: Configuration = field(repr=False)


@dataclass(frozen=True)
class IntegralResult:
    value: complex
    error_estimate: float
    evaluations: int


# ---------------------------------------------------------------------------
# cycles
# ---------------------------------------------------------------------------

def _neighbour_distance(x: complex, q: Configuration) -> float:
    """Distance from x to the nearest puncture translate other than x itself."""
    tr, _, _ = lattice_translates(q.punctures, [x], q.lattice, q.scale)
    d = np.abs(tr - x)
    return float(d[d > 1e-9 * q.scale].min())


def build_cycle(mu: str, q: Configuration, a: AlphaParam, epsilon: float | None = None) -> RegularizedCycle:
    mu = canonical_index(mu)
    c = a.c
    if not mu.startswith("("):
        k = int(mu[1])
        loop = period_loop(k, q)
        check_clearance(loop, q)
        return RegularizedCycle("period", mu, None, (CyclePiece(loop, 1.0),), q.root_branch, q)

    if epsilon is None:
        epsilon = DEFAULT_EPSILON * abs(q.lattice.omega1)
    i, j = segment_endpoints(mu)
    xi, xj = q.points[i], q.points[j]
    span = abs(xj - xi)
    room = min(0.5 * span, 0.5 * _neighbour_distance(xi, q), 0.5 * _neighbour_distance(xj, q))
    if not 0 < epsilon < room:
        raise EpsilonTooLarge(f"epsilon = {epsilon:.4g} must lie in (0, {room:.4g}) for {mu}")
    u = (xj - xi) / span
    p, pe = xi + epsilon * u, xj - epsilon * u
    circle_i = CurvePath.circle(xi, p)
    seg = CurvePath((Segment(p, pe),))
    circle_j = CurvePath.circle(xj, pe)
    for path in (circle_i, seg, circle_j):
        check_clearance(path, q)
    w = 1.0 / (c - 1.0)
    pieces = (
        CyclePiece(circle_i, w, None),
        CyclePiece(seg, 1.0, None),
        CyclePiece(circle_j, -w, 1),
    )
    return RegularizedCycle("segment", mu, float(epsilon), pieces, section_log(p, q), q)


# ---------------------------------------------------------------------------
# integration with branch tracking
# ---------------------------------------------------------------------------

def _unwrap(g_of_s, s_prev: float, g_prev: complex, L_prev: complex, ss: np.ndarray, gs: np.ndarray):
    """Continued log g at the sorted parameters ss (values gs), starting from (s_prev, g_prev, L_prev)."""
    ratios = gs / np.concatenate([[g_prev], gs[:-1]])
    steps = np.log(ratios)
    if np.all(np.abs(steps.imag) < STEP_LIMIT):
        return L_prev + np.cumsum(steps)
    from .local_system import advance_log

    out = np.empty(len(ss), dtype=complex)
    s0, g0, L0 = s_prev, g_prev, L_prev
    for k, (s1, g1) in enumerate(zip(ss, gs)):
        step = steps[k]
        if abs(step.imag) < STEP_LIMIT:
            L1 = L0 + step
        else:
            _, L1 = advance_log(g_of_s, s0, g0, L0, float(s1))
        out[k] = L1
        s0, g0, L0 = float(s1), complex(g1), L1
    return out


def _integrate_piece(piece, q: Configuration, alpha: complex, L_start: complex, tol: float):
    def g_of_s(s):
        return g_value(piece.point(s), q)

    g_start = complex(g_of_s(0.0))

    def evaluate(sa, sb, st, nodes):
        g0, L0 = st
        ss = np.concatenate([nodes, [sb]])
        gs = np.asarray(g_value(piece.point(ss), q), dtype=complex)
        Ls = _unwrap(g_of_s, sa, g0, L0, ss, gs)
        vals = np.exp(alpha * Ls[:-1]) * piece.deriv(nodes)
        mid = gk.CENTER
        return vals, (gs[mid], Ls[mid]), (gs[-1], Ls[-1])

    breaks = piece_breaks(piece, q)
    res = gk.integrate_panels(evaluate, breaks, (g_start, L_start), tol)
    g_end, L_end = res.end_state
    return res, snap_log(piece.end, L_end, q)


def integrate_path(path: CurvePath, start: BranchState, q: Configuration, alpha: complex,
                   tol: float = DEFAULT_TOL) -> tuple[IntegralResult, BranchState]:
    """Integral of g^alpha along a path, with log g continued from `start`.

    `alpha` may be any complex number (alpha = 1 gives the single-valued g).
    """
    if abs(path.start - start.basepoint) > 1e-12 * max(1.0, q.scale):
        raise ValueError("path does not start at the branch basepoint")
    check_clearance(path, q)
    alpha = complex(alpha.alpha if isinstance(alpha, AlphaParam) else alpha)
    live = [p for p in path.pieces if p.length > 0]
    share = tol / max(1, len(live))
    value, err, nev = 0j, 0.0, 0
    L = start.log_g
    for piece in live:
        res, L = _integrate_piece(piece, q, alpha, L, share)
        value += res.value
        err += res.error
        nev += res.evaluations
    return IntegralResult(value, err, nev), BranchState(path.end, L)


def integrate(cycle: RegularizedCycle, a: AlphaParam, tol: float = DEFAULT_TOL) -> IntegralResult:
    """Weighted sum of the piece integrals of g^alpha."""
    q = cycle.q
    ends: list[BranchState] = []
    value, err, nev = 0j, 0.0, 0
    for piece in cycle.pieces:
        start = cycle.branch if piece.start_from is None else ends[piece.start_from]
        w = complex(piece.weight)
        res, end = integrate_path(piece.path, start, q, a.alpha, tol / (len(cycle.pieces) * max(1.0, abs(w))))
        ends.append(end)
        value += w * res.value
        err += abs(w) * res.error_estimate
        nev += res.evaluations
    if not np.isfinite(value):
        raise QuadratureFailure("non-finite integral")
    return IntegralResult(complex(value), float(err), nev)


def period_integral(mu: str, q: Configuration, a: AlphaParam, epsilon: float | None = None,
                    tol: float = DEFAULT_TOL) -> complex:
    return integrate(build_cycle(mu, q, a, epsilon), a, tol).value


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def default_epsilon(q: Configuration) -> float:
    return min(DEFAULT_EPSILON * abs(q.lattice.omega1), 0.2 * q.min_separation)


def vanishing_limit(label, a: AlphaParam, s_values, lattice: Lattice, epsilon: float | None = None,
                    tol: float = DEFAULT_TOL) -> list[float]:
    """|integral of g^alpha over the vanishing cycle| at q = gamma(s) for each s."""
    from .picard_lefschetz import parse_label, path_point, vanishing_cycle

    if isinstance(label, str):
        label = parse_label(label)
    delta = vanishing_cycle(label)
    out = []
    for s in s_values:
        if not 0.0 <= s < 0.5:
            raise ValueError("s values must lie in [0, 1/2)")
        # the extended path runs straight into the singular point, so the
        # deformation window does not apply here
        q = path_point(label, float(s), lattice, eps_det=0.0)
        eps = default_epsilon(q) if epsilon is None else epsilon
        total = 0j
        for mu, coef in zip(J, delta.coeffs):
            if coef:
                total += coef(a.c) * period_integral(mu, q, a, eps, tol)
        out.append(abs(total))
    return out


def ellipticity_residual(q: Configuration, n: int = 12, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    uv = rng.random((4 * n, 2))
    t = uv[:, 0] * q.lattice.omega1 + uv[:, 1] * q.lattice.omega2
    t = t[q.puncture_distance(t) > 0.05 * q.scale][:n]
    g = g_value(t, q)
    worst = 0.0
    for w in (q.lattice.omega1, q.lattice.omega2):
        worst = max(worst, float(np.max(np.abs(g_value(t + w, q) - g) / np.abs(g))))
    return worst


def monodromy_ratios(q: Configuration, a: AlphaParam, radius: float | None = None) -> dict[str, complex]:
    """Factor gained by g^alpha around each puncture (x0, x1, x2, then 0)."""
    if radius is None:
        radius = 0.25 * q.min_separation
    out = {}
    for name, x in zip(("x0", "x1", "x2", "0"), (*q.points, 0j)):
        inc = monodromy_log_increment(x, radius, q)
        out[name] = cmath.exp(a.alpha * inc)
    return out


def _record(check: str, value: float, threshold: float, below: bool = True) -> dict:
    ok = value < threshold if below else value > threshold
    return {"check": check, "value": float(value), "threshold": float(threshold), "pass": bool(ok)}


def numeric_report(q: Configuration, a: AlphaParam, epsilons=(0.02, 0.03, 0.05),
                   thresholds: dict | None = None, tol: float = DEFAULT_TOL) -> list[dict]:
    th = dict(DEFAULT_THRESHOLDS)
    th.update(thresholds or {})
    recs = [_record("legendre_residual", q.lattice.legendre_residual(), th["legendre"])]
    for i in (1, 2):
        recs.append(_record(f"I{i}_residual", abs(abelian_integral_I(i, q)), th["I"]))
    c = a.c
    for name, ratio in monodromy_ratios(q, a).items():
        target = c ** -3 if name == "0" else c
        recs.append(_record(f"monodromy_{name}", abs(ratio - target), th["monodromy"]))
    recs.append(_record("g_ellipticity", ellipticity_residual(q), th["ellipticity"]))

    w1 = abs(q.lattice.omega1)
    F = {}
    for mu in ("(01)", "(12)", "(20)"):
        vals = [period_integral(mu, q, a, e * w1, tol) for e in epsilons]
        F[mu] = vals[0]
        spread = max(abs(v - vals[0]) for v in vals) / max(abs(vals[0]), 1e-300)
        recs.append(_record(f"eps_independence_{mu}", spread, th["eps_independence"]))
    total = abs(sum(F.values())) / max(abs(v) for v in F.values())
    recs.append(_record("relation_residual", total, th["relation"]))
    return recs
