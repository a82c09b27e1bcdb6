"""The multi-valued integrand g^alpha on the four-punctured torus.

    g(t) = sigma(t-x0) sigma(t-x1) sigma(t-x2) / (sigma(t)^3 sigma(x0) sigma(x1) sigma(x2))

with x0 + x1 + x2 = 0, so g is elliptic with zeros at x0, x1, x2 and a
triple pole at 0.  Branches of g^alpha are handled through a continued
value of log g (a ``BranchState``).

The cut domain is the torus minus the three segments [0, x_i] (and all of
their lattice translates in the plane).  On it log g has a single-valued
branch; we normalise it to the principal logarithm at a canonical
basepoint t* and call it the section.  Its value anywhere in the cut
domain is obtained by continuing along any puncture-free route and
correcting by -2 pi i for every counter-clockwise crossing of a cut.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import gk
from .errors import (
    ClearanceViolation,
    InvalidAlpha,
    InvalidConfiguration,
    NoClearLoopFound,
    PoleOrZero,
    QuadratureFailure,
)
from .kernel import POLE_GUARD, Lattice, sigma, zeta
from .paths import (
    Arc,
    CurvePath,
    Segment,
    grid_route,
    point_segment_distance,
    segment_segment_distance,
    signed_crossings,
)

DEFAULT_CLEARANCE = 1e-6
CONFIG_TOL = 1e-9
ALPHA_TOL = 1e-9
BASEPOINT_GRID = 64
TWO_PI_I = 2j * math.pi


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlphaParam:
    alpha: complex

    def __post_init__(self):
        a = complex(self.alpha)
        object.__setattr__(self, "alpha", a)
        for k in (2, 3):
            nearest = round(a.real * k) / k
            if abs(a - nearest) < ALPHA_TOL:
                raise InvalidAlpha(f"alpha = {a} lies in (1/{k})Z (excluded)")
        if abs(self.c - 1) == 0:
            raise InvalidAlpha("c = exp(2 pi i alpha) must differ from 1")

    @property
    def c(self) -> complex:
        return cmath.exp(2j * math.pi * self.alpha)


@dataclass(frozen=True)
class BranchState:
    """A point together with a chosen value of log g there."""

    basepoint: complex
    log_g: complex


# ---------------------------------------------------------------------------
# configurations
# ---------------------------------------------------------------------------

def _lattice_window(L: Lattice, pad: float) -> tuple[float, float]:
    area = abs((np.conj(L.omega1) * L.omega2).imag)
    return pad * abs(L.omega2) / area + 1.0, pad * abs(L.omega1) / area + 1.0


def lattice_translates(points, zs, L: Lattice, pad: float):
    """All translates p + w (p in `points`) that may lie within `pad` of the region spanned by zs.

    Returns (translates, index of the source point, lattice vector).
    """
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    pa, pb = _lattice_window(L, pad)
    out_p, out_i, out_w = [], [], []
    for idx, p in enumerate(points):
        a, b = L.coords(zs - p)
        ms = np.arange(math.floor(a.min() - pa), math.ceil(a.max() + pa) + 1)
        ns = np.arange(math.floor(b.min() - pb), math.ceil(b.max() + pb) + 1)
        mm, nn = np.meshgrid(ms, ns)
        w = (mm * L.omega1 + nn * L.omega2).ravel()
        out_p.append(p + w)
        out_i.append(np.full(w.shape, idx))
        out_w.append(w)
    return np.concatenate(out_p), np.concatenate(out_i), np.concatenate(out_w)


@dataclass(frozen=True, eq=False)
class Configuration:
    """Representatives (x0, x1, x2) with x0 + x1 + x2 = 0 on a lattice."""

    x0: complex
    x1: complex
    lattice: Lattice
    checked: bool = True

    def __post_init__(self):
        object.__setattr__(self, "x0", complex(self.x0))
        object.__setattr__(self, "x1", complex(self.x1))
        if self.checked:
            bad = self.singular_pairs()
            if bad:
                raise InvalidConfiguration(f"configuration lies on singular loci {sorted(bad)}")

    @classmethod
    def from_points(cls, x0, x1, x2, lattice: Lattice, checked: bool = True) -> "Configuration":
        s = complex(x0) + complex(x1) + complex(x2)
        if abs(s) > 1e-12 * max(1.0, abs(x0), abs(x1), abs(x2), lattice.scale):
            raise InvalidConfiguration(f"representatives must sum to 0 (sum = {s})")
        return cls(x0, x1, lattice, checked)

    @property
    def x2(self) -> complex:
        return -self.x0 - self.x1

    @property
    def points(self) -> tuple[complex, complex, complex]:
        return (self.x0, self.x1, self.x2)

    @property
    def punctures(self) -> np.ndarray:
        """0 first, then x0, x1, x2."""
        return np.array([0j, self.x0, self.x1, self.x2])

    @property
    def scale(self) -> float:
        return self.lattice.scale

    def singular_pairs(self, tol: float = CONFIG_TOL) -> set[str]:
        L = self.lattice
        out = set()
        xs = self.points
        for i in range(3):
            if L.distance_to_lattice(xs[i]) < tol * L.scale:
                out.add(f"D^{i}_inf")
            for j in range(i + 1, 3):
                if L.distance_to_lattice(xs[i] - xs[j]) < tol * L.scale:
                    out.add(f"D^{i}{j}")
        return out

    def in_standard_chamber(self) -> bool:
        """arg x0 < arg x1 < arg x2 with principal arguments."""
        a = [cmath.phase(x) for x in self.points]
        return a[0] < a[1] < a[2]

    @cached_property
    def min_separation(self) -> float:
        """Smallest distance on the torus between two of the four punctures."""
        P = self.punctures
        L = self.lattice
        return float(min(L.distance_to_lattice(P[i] - P[j]) for i in range(4) for j in range(i + 1, 4)))

    # distances -----------------------------------------------------------
    def puncture_distance(self, t):
        t = np.asarray(t, dtype=complex)
        best = np.full(t.shape, np.inf)
        for p in self.punctures:
            best = np.minimum(best, self.lattice.distance_to_lattice(t - p))
        return best

    def nearest_puncture(self, t: complex) -> tuple[complex, int]:
        """Nearest puncture translate to t and its index into ``punctures``."""
        tr, idx, _ = lattice_translates(self.punctures, [t], self.lattice, 0.0)
        k = int(np.argmin(np.abs(tr - t)))
        return complex(tr[k]), int(idx[k])

    def spokes_near(self, zs, pad: float):
        """Cut segments [w, w + x_i] that may come within `pad` of the points zs.

        Returns arrays (a, b, i) with a = w, b = w + x_i and i the spoke index.
        """
        reach = pad + max(abs(x) for x in self.points)
        w, _, _ = lattice_translates([0j], zs, self.lattice, reach)
        a = np.concatenate([w] * 3)
        b = np.concatenate([w + x for x in self.points])
        i = np.concatenate([np.full(w.shape, k) for k in range(3)])
        return a, b, i

    def spoke_distance(self, t, pad: float | None = None):
        t = np.asarray(t, dtype=complex)
        flat = t.ravel()
        if pad is None:
            pad = self.scale
        a, b, _ = self.spokes_near(flat, pad)
        d = np.full(flat.shape, np.inf)
        chunk = max(1, 200000 // max(1, a.size))
        for s in range(0, flat.size, chunk):
            part = flat[s:s + chunk]
            d[s:s + chunk] = point_segment_distance(part[:, None], a[None, :], b[None, :]).min(axis=1)
        return d.reshape(t.shape)

    # canonical basepoint ---------------------------------------------------
    @cached_property
    def basepoint(self) -> complex:
        """Cell point farthest from the cuts on a 64x64 grid."""
        n = BASEPOINT_GRID
        u = (np.arange(n) + 0.5) / n
        aa, bb = np.meshgrid(u, u)
        grid = (aa * self.lattice.omega1 + bb * self.lattice.omega2).ravel()
        d = self.spoke_distance(grid)
        return complex(grid[int(np.argmax(d))])

    @cached_property
    def root_branch(self) -> BranchState:
        t = self.basepoint
        return BranchState(t, cmath.log(complex(g_value(t, self))))


# ---------------------------------------------------------------------------
# g and dlog g
# ---------------------------------------------------------------------------

def _guard(t, q: Configuration):
    if np.any(q.puncture_distance(t) < POLE_GUARD * q.scale):
        raise PoleOrZero("evaluation point is within pole_guard of a puncture")


def g_value(t, q: Configuration):
    t = np.asarray(t, dtype=complex)
    _guard(t, q)
    L = q.lattice
    num = sigma(t - q.x0, L) * sigma(t - q.x1, L) * sigma(t - q.x2, L)
    den = sigma(t, L) ** 3 * (sigma(q.x0, L) * sigma(q.x1, L) * sigma(q.x2, L))
    out = num / den
    return complex(out) if np.ndim(out) == 0 else out


def dlog_g_points(t, points, L: Lattice):
    """zeta(t-p0) + zeta(t-p1) + zeta(t-p2) - 3 zeta(t) for arbitrary points."""
    t = np.asarray(t, dtype=complex)
    out = sum(zeta(t - p, L) for p in points) - 3 * zeta(t, L)
    return out


def dlog_g(t, q: Configuration):
    t = np.asarray(t, dtype=complex)
    _guard(t, q)
    out = dlog_g_points(t, q.points, q.lattice)
    return complex(out) if np.ndim(out) == 0 else out


def in_cut_domain(t, q: Configuration, clearance: float | None = None):
    if clearance is None:
        clearance = DEFAULT_CLEARANCE * q.scale
    d = q.spoke_distance(t)
    out = d > clearance
    return bool(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# path bookkeeping
# ---------------------------------------------------------------------------

def _point_arc_distance(p, arc: Arc):
    p = np.asarray(p, dtype=complex)
    rel = p - arc.center
    ang = np.angle(rel)
    lo = min(arc.theta0, arc.theta0 + arc.sweep)
    span = abs(arc.sweep)
    if span >= 2 * math.pi - 1e-15:
        return np.abs(np.abs(rel) - arc.radius)
    off = np.mod(ang - lo, 2 * math.pi)
    radial = np.abs(np.abs(rel) - arc.radius)
    ends = np.minimum(np.abs(p - arc.point(0.0)), np.abs(p - arc.point(1.0)))
    return np.where(off <= span, radial, ends)


def piece_clearance(piece, q: Configuration) -> float:
    pts = np.array([piece.start, piece.end, piece.point(0.5)])
    tr, _, _ = lattice_translates(q.punctures, pts, q.lattice, piece.length + q.scale)
    if isinstance(piece, Segment):
        return float(point_segment_distance(tr, piece.a, piece.b).min())
    return float(_point_arc_distance(tr, piece).min())


def check_clearance(path: CurvePath, q: Configuration, clearance: float | None = None) -> float:
    if clearance is None:
        clearance = DEFAULT_CLEARANCE * q.scale
    worst = min(piece_clearance(p, q) for p in path.pieces)
    if worst < clearance:
        raise ClearanceViolation(f"path passes within {worst:.3e} of a puncture (clearance {clearance:.3e})")
    return worst


def piece_breaks(piece, q: Configuration, kappa: float = 0.5, max_panels: int = 4000) -> list[float]:
    """Initial partition with panel length <= kappa * distance to the punctures."""
    if piece.length == 0:
        return [0.0, 1.0]
    pts = np.array([piece.start, piece.end, piece.point(0.5)])
    tr, _, _ = lattice_translates(q.punctures, pts, q.lattice, piece.length + q.scale)
    speed = piece.length
    breaks = [0.0]
    s = 0.0
    while s < 1.0:
        d = float(np.abs(tr - complex(piece.point(s))).min())
        ds = kappa * d / speed
        if ds <= 0:
            raise ClearanceViolation("path touches a puncture")
        s = min(1.0, s + ds)
        if 1.0 - s < 0.25 * ds:
            s = 1.0
        breaks.append(s)
        if len(breaks) > max_panels:
            raise QuadratureFailure("initial partition too fine; path hugs a puncture")
    return breaks


def _dlog_integral_piece(piece, q: Configuration, tol: float, points=None) -> gk.QuadResult:
    pts = q.points if points is None else points
    L = q.lattice

    def f(s):
        return dlog_g_points(piece.point(s), pts, L) * piece.deriv(s)

    return gk.integrate_function(f, piece_breaks(piece, q), tol)


def integrate_dlog(path: CurvePath, q: Configuration, tol: float = 1e-12, points=None) -> complex:
    """Raw integral of dlog g along the path (no snapping)."""
    total = 0j
    for piece in path.pieces:
        if piece.length == 0:
            continue
        total += _dlog_integral_piece(piece, q, tol / max(1, len(path.pieces)), points).value
    return total


def snap_log(t: complex, approx: complex, q: Configuration) -> complex:
    """The logarithm of g(t) nearest to `approx` (they differ by 2 pi i k)."""
    base = cmath.log(complex(g_value(t, q)))
    k = round((approx - base).imag / (2 * math.pi))
    if abs(approx.real - base.real) > 1e-6 or abs((approx - base).imag - 2 * math.pi * k) > 1e-3:
        raise QuadratureFailure(
            f"continued log g disagrees with g(t): residual {approx - base - TWO_PI_I * k}"
        )
    return base + TWO_PI_I * k


def continue_log_g(path: CurvePath, q: Configuration, start: BranchState,
                   clearance: float | None = None, tol: float = 1e-12) -> BranchState:
    if abs(path.start - start.basepoint) > 1e-12 * max(1.0, q.scale):
        raise ValueError("path does not start at the branch basepoint")
    check_clearance(path, q, clearance)
    if path.length == 0:
        return start
    raw = start.log_g + integrate_dlog(path, q, tol)
    return BranchState(path.end, snap_log(path.end, raw, q))


def g_alpha(t: complex, branch: BranchState, a: AlphaParam) -> complex:
    if abs(complex(t) - branch.basepoint) > 1e-12 * max(1.0, abs(branch.basepoint)):
        raise ValueError("branch state is not located at t")
    return cmath.exp(a.alpha * branch.log_g)


def advance_log(g_of_s, s0: float, g0: complex, L0: complex, s1: float, depth: int = 0):
    """Continue log g from s0 to s1 by bisection until each step turns < 0.75 rad."""
    g1 = complex(g_of_s(s1))
    step = cmath.log(g1 / g0)
    if abs(step.imag) < 0.75:
        return g1, L0 + step
    if depth > 40:
        raise QuadratureFailure("cannot resolve the argument of g along the path")
    sm = 0.5 * (s0 + s1)
    gm, Lm = advance_log(g_of_s, s0, g0, L0, sm, depth + 1)
    return advance_log(g_of_s, sm, gm, Lm, s1, depth + 1)


# ---------------------------------------------------------------------------
# the section on the cut domain, and routes inside it
# ---------------------------------------------------------------------------

_DELTAS = (0.06, 0.03, 0.015, 0.0075, 0.00375)


def _cut_leg_ok(q: Configuration, delta: float):
    def leg_ok(a: complex, b: complex) -> bool:
        mid = 0.5 * (a + b)
        sa, sb, _ = q.spokes_near([mid], abs(b - a) / 2 + delta)
        return bool(segment_segment_distance(a, b, sa, sb).min() >= delta)
    return leg_ok


def cut_domain_route(start: complex, goal: complex, q: Configuration) -> list[complex]:
    """Polyline from start to goal avoiding all cuts, with the largest clearance we can find."""
    ds = q.spoke_distance(np.array([start, goal]))
    span = max(abs(q.lattice.omega1), abs(q.lattice.omega2))
    for frac in _DELTAS:
        delta = frac * q.scale
        if ds.min() < delta:
            continue
        leg_ok = _cut_leg_ok(q, 0.5 * delta)

        def node_ok(z, delta=delta):
            return q.spoke_distance(z, pad=delta) >= delta

        route = grid_route(start, goal, node_ok, leg_ok, h=0.5 * delta, margin=0.75 * span)
        if route is not None:
            return route
    raise NoClearLoopFound(f"no route inside the cut domain from {start} to {goal}")


def route_crossings(points, q: Configuration) -> int:
    """Signed number of cut crossings along a polyline (+1 = counter-clockwise about the tip)."""
    pts = np.asarray(points, dtype=complex)
    total = 0
    for p0, p1 in zip(pts[:-1], pts[1:]):
        mid = 0.5 * (p0 + p1)
        a, b, _ = q.spokes_near([mid], abs(p1 - p0) / 2 + 1e-9)
        total += int(signed_crossings(p0, p1, a, b).sum())
    return total


def _puncture_leg_ok(q: Configuration, delta: float):
    def leg_ok(a: complex, b: complex) -> bool:
        need = 0.5 * min(delta, float(q.puncture_distance(a)), float(q.puncture_distance(b)))
        mid = 0.5 * (a + b)
        tr, _, _ = lattice_translates(q.punctures, [mid], q.lattice, abs(b - a) / 2 + delta)
        return bool(point_segment_distance(tr, a, b).min() >= need)
    return leg_ok


def section_route(p: complex, q: Configuration) -> CurvePath:
    """A polyline from the basepoint to p that keeps away from the punctures.

    It may cross the cuts; section_log accounts for every crossing.
    """
    t0 = q.basepoint
    span = max(abs(q.lattice.omega1), abs(q.lattice.omega2))
    for frac in _DELTAS:
        delta = frac * q.scale
        leg_ok = _puncture_leg_ok(q, delta)

        def node_ok(z, delta=delta):
            return q.puncture_distance(z) >= delta

        route = grid_route(t0, p, node_ok, leg_ok, h=0.5 * delta, margin=0.5 * span)
        if route is not None:
            return CurvePath.through(route)
    raise NoClearLoopFound(f"no puncture-free route from the basepoint to {p}")


def section_log(p: complex, q: Configuration, clearance: float | None = None) -> BranchState:
    """Value of the single-valued branch of log g at a point p of the cut domain."""
    p = complex(p)
    if not in_cut_domain(p, q, clearance):
        raise ClearanceViolation(f"{p} is not in the cut domain")
    path = section_route(p, q)
    cont = continue_log_g(path, q, q.root_branch, clearance)
    k = route_crossings(path.polyline(), q)
    return BranchState(p, cont.log_g - TWO_PI_I * k)


def period_loop(i: int, q: Configuration) -> CurvePath:
    """Loop from the basepoint to basepoint + omega_i inside the cut domain."""
    if i not in (1, 2):
        raise ValueError("period index must be 1 or 2")
    t0 = q.basepoint
    route = cut_domain_route(t0, t0 + q.lattice.period(i), q)
    return CurvePath.through(route)


def abelian_integral_I(i: int, q: Configuration, points=None, tol: float = 1e-13) -> complex:
    """Integral of dlog g over the period loop l_{omega_i}.

    `points` overrides the representatives used in the integrand (for
    probing the dependence on x0 + x1 + x2); the loop is still the one
    built for q.
    """
    loop = period_loop(i, q)
    check_clearance(loop, q)
    return integrate_dlog(loop, q, tol, points=points)


def monodromy_log_increment(center: complex, radius: float, q: Configuration, tol: float = 1e-13) -> complex:
    """Increment of log g around a counter-clockwise circle."""
    path = CurvePath((Arc(complex(center), radius, 0.0, 2 * math.pi),))
    check_clearance(path, q)
    return integrate_dlog(path, q, tol)
