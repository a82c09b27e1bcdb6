"""Piecewise paths in the complex plane and the planar geometry around them.

A path is a tuple of pieces (straight segments and circular arcs), each
parametrised on s in [0, 1].  The helpers here compute distances to point
sets and to segment sets, count signed crossings with segments, and route
polylines around obstacles on a grid.
"""
from __future__ import annotations

import cmath
import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class Segment:
    a: complex
    b: complex

    def point(self, s):
        return self.a + (self.b - self.a) * np.asarray(s, dtype=float)

    def deriv(self, s):
        return np.full(np.shape(s), self.b - self.a, dtype=complex)

    @property
    def length(self) -> float:
        return abs(self.b - self.a)

    @property
    def start(self) -> complex:
        return self.a

    @property
    def end(self) -> complex:
        return self.b

    def reversed(self) -> "Segment":
        return Segment(self.b, self.a)

    def polyline(self, n: int = 1) -> np.ndarray:
        return self.point(np.linspace(0.0, 1.0, n + 1))


@dataclass(frozen=True)
class Arc:
    """center + radius * exp(i (theta0 + sweep * s)); sweep > 0 is counter-clockwise."""

    center: complex
    radius: float
    theta0: float
    sweep: float

    def point(self, s):
        s = np.asarray(s, dtype=float)
        return self.center + self.radius * np.exp(1j * (self.theta0 + self.sweep * s))

    def deriv(self, s):
        s = np.asarray(s, dtype=float)
        return 1j * self.sweep * self.radius * np.exp(1j * (self.theta0 + self.sweep * s))

    @property
    def length(self) -> float:
        return abs(self.sweep) * self.radius

    @property
    def start(self) -> complex:
        return complex(self.point(0.0))

    @property
    def end(self) -> complex:
        return complex(self.point(1.0))

    def reversed(self) -> "Arc":
        return Arc(self.center, self.radius, self.theta0 + self.sweep, -self.sweep)

    def polyline(self, n: int | None = None) -> np.ndarray:
        if n is None:
            n = max(8, int(math.ceil(abs(self.sweep) / (math.pi / 32))))
        return self.point(np.linspace(0.0, 1.0, n + 1))


Piece = Segment | Arc


@dataclass(frozen=True)
class CurvePath:
    pieces: tuple

    @classmethod
    def through(cls, points: Sequence[complex]) -> "CurvePath":
        pts = [complex(p) for p in points]
        segs = tuple(Segment(a, b) for a, b in zip(pts[:-1], pts[1:]) if a != b)
        return cls(segs) if segs else cls.constant(pts[0])

    @classmethod
    def circle(cls, center: complex, start: complex, turns: int = 1) -> "CurvePath":
        """Full loop(s) around `center` beginning and ending at `start`."""
        r = abs(start - center)
        th = cmath.phase(start - center)
        return cls((Arc(complex(center), r, th, 2 * math.pi * turns),))

    @classmethod
    def constant(cls, point: complex) -> "CurvePath":
        return cls((Segment(complex(point), complex(point)),))

    @property
    def start(self) -> complex:
        return self.pieces[0].start

    @property
    def end(self) -> complex:
        return self.pieces[-1].end

    @property
    def length(self) -> float:
        return sum(p.length for p in self.pieces)

    def reversed(self) -> "CurvePath":
        return CurvePath(tuple(p.reversed() for p in reversed(self.pieces)))

    def __add__(self, other: "CurvePath") -> "CurvePath":
        if abs(self.end - other.start) > 1e-12 * max(1.0, abs(self.end)):
            raise ValueError("paths do not concatenate: end != start")
        return CurvePath(self.pieces + other.pieces)

    def translate(self, w: complex) -> "CurvePath":
        out = []
        for p in self.pieces:
            if isinstance(p, Segment):
                out.append(Segment(p.a + w, p.b + w))
            else:
                out.append(Arc(p.center + w, p.radius, p.theta0, p.sweep))
        return CurvePath(tuple(out))

    def polyline(self) -> np.ndarray:
        chunks = [self.pieces[0].polyline()[:1]]
        for p in self.pieces:
            chunks.append(p.polyline()[1:])
        return np.concatenate(chunks)


# ---------------------------------------------------------------------------
# planar geometry
# ---------------------------------------------------------------------------

def point_segment_distance(p, a, b):
    """Distance from points p to segments [a, b]; broadcasts."""
    p = np.asarray(p, dtype=complex)
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    d = b - a
    dd = np.abs(d) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(dd > 0, ((p - a) * np.conj(d)).real / np.where(dd > 0, dd, 1.0), 0.0)
    s = np.clip(s, 0.0, 1.0)
    return np.abs(p - (a + s * d))


def _cross(u, v):
    return (np.conj(u) * v).imag


def segments_intersect(p0, p1, a, b):
    """Proper-or-touching intersection test of [p0, p1] with each [a, b]."""
    d = p1 - p0
    e = b - a
    o1 = _cross(d, a - p0)
    o2 = _cross(d, b - p0)
    o3 = _cross(e, p0 - a)
    o4 = _cross(e, p1 - a)
    return (o1 * o2 <= 0) & (o3 * o4 <= 0) & ~((o1 == 0) & (o2 == 0))


def segment_segment_distance(p0, p1, a, b):
    """Distance between segment [p0, p1] and each segment [a, b]."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    dist = np.minimum.reduce([
        point_segment_distance(p0, a, b),
        point_segment_distance(p1, a, b),
        point_segment_distance(a, p0, p1),
        point_segment_distance(b, p0, p1),
    ])
    return np.where(segments_intersect(p0, p1, a, b), 0.0, dist)


def signed_crossings(p0: complex, p1: complex, a, b) -> np.ndarray:
    """Signed transversal crossings of the step [p0, p1] with each [a, b].

    +1 when the step passes counter-clockwise around the tip b (negative
    cross product of b - a with the step), -1 the other way, 0 if disjoint.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    d = p1 - p0
    e = b - a
    o1 = _cross(d, a - p0)
    o2 = _cross(d, b - p0)
    o3 = _cross(e, p0 - a)
    o4 = _cross(e, p1 - a)
    hit = (o1 * o2 < 0) & (o3 * o4 < 0)
    return np.where(hit, np.where(_cross(e, d) < 0, 1, -1), 0)


def path_polyline_points(path: CurvePath) -> np.ndarray:
    return path.polyline()


# ---------------------------------------------------------------------------
# grid routing
# ---------------------------------------------------------------------------

def grid_route(
    start: complex,
    goal: complex,
    node_ok: Callable[[np.ndarray], np.ndarray],
    leg_ok: Callable[[complex, complex], bool],
    h: float,
    margin: float,
) -> list[complex] | None:
    """Shortest 8-connected grid path from `start` to `goal`, then string-pulled.

    `node_ok` masks admissible grid nodes; `leg_ok` decides whether a
    straight leg is admissible and is used for attaching the endpoints and
    for shortcutting.  Returns the waypoint list or None.
    """
    if leg_ok(start, goal):
        return [start, goal]
    lo_x = min(start.real, goal.real) - margin
    hi_x = max(start.real, goal.real) + margin
    lo_y = min(start.imag, goal.imag) - margin
    hi_y = max(start.imag, goal.imag) + margin
    nx = int(math.ceil((hi_x - lo_x) / h)) + 1
    ny = int(math.ceil((hi_y - lo_y) / h)) + 1
    xs = lo_x + h * np.arange(nx)
    ys = lo_y + h * np.arange(ny)
    grid = xs[None, :] + 1j * ys[:, None]
    ok = node_ok(grid.ravel()).reshape(grid.shape)

    def attach(p):
        i0 = int(round((p.imag - lo_y) / h))
        j0 = int(round((p.real - lo_x) / h))
        best = []
        for di in range(-3, 4):
            for dj in range(-3, 4):
                i, j = i0 + di, j0 + dj
                if 0 <= i < ny and 0 <= j < nx and ok[i, j]:
                    best.append((abs(grid[i, j] - p), i, j))
        for _, i, j in sorted(best):
            if leg_ok(p, complex(grid[i, j])):
                return i, j
        return None

    s_node = attach(start)
    g_node = attach(goal)
    if s_node is None or g_node is None:
        return None
    prev = {s_node: None}
    dq = deque([s_node])
    steps = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]
    while dq:
        cur = dq.popleft()
        if cur == g_node:
            break
        ci, cj = cur
        for di, dj in steps:
            nxt = (ci + di, cj + dj)
            if 0 <= nxt[0] < ny and 0 <= nxt[1] < nx and ok[nxt] and nxt not in prev:
                prev[nxt] = cur
                dq.append(nxt)
    if g_node not in prev:
        return None
    chain = []
    node = g_node
    while node is not None:
        chain.append(complex(grid[node]))
        node = prev[node]
    chain.reverse()
    pts = [start] + chain + [goal]
    return string_pull(pts, leg_ok)


def string_pull(points: list[complex], leg_ok: Callable[[complex, complex], bool]) -> list[complex]:
    out = [points[0]]
    i = 0
    n = len(points)
    while i < n - 1:
        j = n - 1
        while j > i + 1 and not leg_ok(points[i], points[j]):
            j -= 1
        out.append(points[j])
        i = j
    return out
