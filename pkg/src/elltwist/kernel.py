"""Weierstrass sigma, zeta and wp for an arbitrary period lattice.

Everything is evaluated through the Jacobi theta function theta_1 in the
nome q = exp(i pi tau), tau = omega2 / omega1.  Arguments are first reduced
to the centred fundamental cell {a*omega1 + b*omega2 : |a|, |b| <= 1/2} and
the quasi-period factors are applied afterwards, so the theta series never
sees large imaginary arguments.

With full periods omega1, omega2 and eta_i = zeta(z + omega_i) - zeta(z):

    sigma(z) = omega1/pi * exp(eta1 z^2 / (2 omega1)) * theta1(v) / theta1'(0)
    zeta(z)  = eta1 z / omega1 + pi/omega1 * theta1'(v) / theta1(v)

where v = pi z / omega1.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DegenerateLattice, PoleAtLatticePoint

THETA_TRUNCATION = 1e-18
POLE_GUARD = 1e-10


def _theta1_derivs(v: np.ndarray, tau: complex, order: int) -> list[np.ndarray]:
    """theta_1 and its first `order` derivatives in v, summed to truncation.

    Assumes |Im v| <= pi Im(tau) / 2 + small, which argument reduction
    guarantees.
    """
    v = np.asarray(v, dtype=complex)
    out = [np.zeros_like(v) for _ in range(order + 1)]
    im_v = float(np.max(np.abs(v.imag))) if v.size else 0.0
    n = 0
    while True:
        k = 2 * n + 1
        coef = 2.0 * (-1) ** n * cmath.exp(1j * math.pi * tau * (n + 0.5) ** 2)
        bound = abs(coef) * math.exp(k * im_v) * k ** order
        if n > 0 and bound < THETA_TRUNCATION:
            break
        s = np.sin(k * v)
        c = np.cos(k * v)
        # d^j/dv^j sin(kv) cycles through sin, cos, -sin, -cos
        cyc = (s, c, -s, -c)
        for j in range(order + 1):
            out[j] = out[j] + coef * k ** j * cyc[j % 4]
        n += 1
        if n > 200:
            raise RuntimeError("theta series failed to converge; lattice too degenerate")
    return out


@dataclass(frozen=True)
class Lattice:
    """Period lattice Gamma = Z omega1 + Z omega2, oriented so Im(tau) > 0.

    ``flipped`` records whether the user's omega2 was negated to get the
    orientation right; ``input_omega2`` keeps the value as supplied.
    """

    omega1: complex
    omega2: complex
    flipped: bool = False
    input_omega2: complex | None = None
    tau: complex = field(init=False)
    nome: complex = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "tau", self.omega2 / self.omega1)
        object.__setattr__(self, "nome", cmath.exp(1j * math.pi * self.tau))

    @cached_property
    def _theta_at_zero(self):
        d = _theta1_derivs(np.zeros(1, dtype=complex), self.tau, 3)
        return complex(d[1][0]), complex(d[3][0])

    @cached_property
    def eta1(self) -> complex:
        t1p, t1ppp = self._theta_at_zero
        return -(math.pi ** 2) * t1ppp / (3.0 * self.omega1 * t1p)

    @cached_property
    def eta2(self) -> complex:
        # same formula on the swapped basis (omega2, -omega1), tau' = -1/tau;
        # the Legendre relation is then a genuine consistency check
        d = _theta1_derivs(np.zeros(1, dtype=complex), -self.omega1 / self.omega2, 3)
        return -(math.pi ** 2) * complex(d[3][0]) / (3.0 * self.omega2 * complex(d[1][0]))

    @property
    def omega0(self) -> complex:
        return -(self.omega1 + self.omega2)

    @property
    def scale(self) -> float:
        return abs(self.omega1)

    def period(self, i: int) -> complex:
        return {0: self.omega0, 1: self.omega1, 2: self.omega2}[i]

    def eta(self, i: int) -> complex:
        return {1: self.eta1, 2: self.eta2}[i]

    @cached_property
    def invariants(self) -> tuple[complex, complex]:
        """(g2, g3) from the Eisenstein series E4, E6 in x = exp(2 pi i tau)."""
        x = self.nome ** 2
        e4 = 1.0 + 0j
        e6 = 1.0 + 0j
        n = 1
        while True:
            xn = x ** n
            term = xn / (1 - xn)
            e4 += 240 * n ** 3 * term
            e6 -= 504 * n ** 5 * term
            if abs(n ** 5 * term) < 1e-18:
                break
            n += 1
        w = self.omega1
        g2 = 4 * math.pi ** 4 / 3 * e4 / w ** 4
        g3 = 8 * math.pi ** 6 / 27 * e6 / w ** 6
        return complex(g2), complex(g3)

    @property
    def g2(self) -> complex:
        return self.invariants[0]

    @property
    def g3(self) -> complex:
        return self.invariants[1]

    def legendre_residual(self) -> float:
        return abs(self.eta1 * self.omega2 - self.eta2 * self.omega1 - 2j * math.pi) / (2 * math.pi)

    def coords(self, z):
        """Real coordinates (a, b) with z = a omega1 + b omega2."""
        z = np.asarray(z, dtype=complex)
        w1, w2 = self.omega1, self.omega2
        det = w1.real * w2.imag - w1.imag * w2.real
        a = (z.real * w2.imag - z.imag * w2.real) / det
        b = (w1.real * z.imag - w1.imag * z.real) / det
        return a, b

    def reduce_centered(self, z):
        """Split z = z0 + m omega1 + n omega2 with z0 in the centred cell."""
        a, b = self.coords(z)
        m = np.round(a)
        n = np.round(b)
        z0 = np.asarray(z, dtype=complex) - m * self.omega1 - n * self.omega2
        return z0, m.astype(np.int64), n.astype(np.int64)

    def distance_to_lattice(self, z):
        """Euclidean distance from z to the nearest lattice point."""
        z0, _, _ = self.reduce_centered(z)
        best = np.abs(z0)
        for dm in (-1, 0, 1):
            for dn in (-1, 0, 1):
                if dm or dn:
                    best = np.minimum(best, np.abs(z0 - dm * self.omega1 - dn * self.omega2))
        return best


def make_lattice(omega1: complex, omega2: complex) -> Lattice:
    omega1 = complex(omega1)
    omega2 = complex(omega2)
    if omega1 == 0 or omega2 == 0:
        raise DegenerateLattice("periods must be non-zero")
    tau = omega2 / omega1
    if abs(tau.imag) <= 1e-14 * max(1.0, abs(tau)):
        raise DegenerateLattice(f"omega2/omega1 = {tau} is real")
    if tau.imag > 0:
        return Lattice(omega1, omega2, False, omega2)
    return Lattice(omega1, -omega2, True, omega2)


@dataclass(frozen=True)
class TorusPoint:
    rep: complex
    lattice: Lattice

    def reduce(self) -> "TorusPoint":
        """Representative in [0,1) omega1 + [0,1) omega2."""
        a, b = self.lattice.coords(self.rep)
        a, b = float(a), float(b)
        fa = a - math.floor(a)
        fb = b - math.floor(b)
        # snap values a hair below 1 caused by rounding
        if fa >= 1.0 - 1e-15:
            fa = 0.0
        if fb >= 1.0 - 1e-15:
            fb = 0.0
        return TorusPoint(fa * self.lattice.omega1 + fb * self.lattice.omega2, self.lattice)

    def same_as(self, other: "TorusPoint", tol: float = 1e-9) -> bool:
        d = self.lattice.distance_to_lattice(self.rep - other.rep)
        return bool(d < tol * self.lattice.scale)


def _scalarize(z, out):
    if np.ndim(z) == 0:
        return complex(out)
    return out


def _check_poles(L: Lattice, z0, m, n):
    d = L.distance_to_lattice(z0)
    if np.any(d < POLE_GUARD * L.scale):
        raise PoleAtLatticePoint("argument is within pole_guard of a lattice point")


def sigma(z, L: Lattice):
    z = np.asarray(z, dtype=complex)
    z0, m, n = L.reduce_centered(z)
    v = math.pi * z0 / L.omega1
    th, _ = _theta1_derivs(v, L.tau, 1)
    t1p, _ = L._theta_at_zero
    base = L.omega1 / math.pi * np.exp(L.eta1 * z0 ** 2 / (2 * L.omega1)) * th / t1p
    w = m * L.omega1 + n * L.omega2
    sign = np.where((m + n + m * n) % 2 == 0, 1.0, -1.0)
    out = sign * np.exp((m * L.eta1 + n * L.eta2) * (z0 + w / 2)) * base
    return _scalarize(z, out)


def zeta(z, L: Lattice):
    z = np.asarray(z, dtype=complex)
    z0, m, n = L.reduce_centered(z)
    _check_poles(L, z0, m, n)
    v = math.pi * z0 / L.omega1
    th, th1 = _theta1_derivs(v, L.tau, 1)
    out = L.eta1 * z0 / L.omega1 + math.pi / L.omega1 * th1 / th
    out = out + m * L.eta1 + n * L.eta2
    return _scalarize(z, out)


def wp(z, L: Lattice):
    z = np.asarray(z, dtype=complex)
    z0, m, n = L.reduce_centered(z)
    _check_poles(L, z0, m, n)
    v = math.pi * z0 / L.omega1
    th, th1, th2 = _theta1_derivs(v, L.tau, 2)
    r1 = th1 / th
    k = math.pi / L.omega1
    out = -L.eta1 / L.omega1 - k ** 2 * (th2 / th - r1 ** 2)
    return _scalarize(z, out)


def wp_prime(z, L: Lattice):
    z = np.asarray(z, dtype=complex)
    z0, m, n = L.reduce_centered(z)
    _check_poles(L, z0, m, n)
    v = math.pi * z0 / L.omega1
    th, th1, th2, th3 = _theta1_derivs(v, L.tau, 3)
    r1 = th1 / th
    k = math.pi / L.omega1
    out = -k ** 3 * (th3 / th - 3 * th2 * th1 / th ** 2 + 2 * r1 ** 3)
    return _scalarize(z, out)


def wp_double_prime(z, L: Lattice):
    """wp'' = 6 wp^2 - g2/2."""
    p = wp(z, L)
    return 6 * p ** 2 - L.g2 / 2


def period_integral_of_wp(i: int, L: Lattice) -> complex:
    """Integral of wp over a loop in the omega_i direction: equals -eta_i."""
    if i not in (1, 2):
        raise ValueError("direction index must be 1 or 2")
    return -L.eta(i)
