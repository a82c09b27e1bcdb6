import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elltwist.errors import (
    ClearanceViolation,
    InvalidAlpha,
    InvalidConfiguration,
    PoleOrZero,
)
from elltwist.kernel import make_lattice, wp_double_prime, wp_prime
from elltwist.local_system import (
    AlphaParam,
    BranchState,
    Configuration,
    abelian_integral_I,
    continue_log_g,
    dlog_g,
    g_alpha,
    g_value,
    in_cut_domain,
    monodromy_log_increment,
    section_log,
)
from elltwist.paths import Arc, CurvePath, point_segment_distance

L = make_lattice(1, 1j)
Q012 = Configuration(0.5, 0.5j, L)  # x2 = -(1+i)/2, the third half period up to sign
QGEN = Configuration(0.23 + 0.11j, -0.41 + 0.37j, L)
TWO_PI_I = 2j * math.pi


def far_points(q, n, seed, clearance=0.08):
    rng = np.random.default_rng(seed)
    z = rng.uniform(-0.5, 0.5, 8 * n) + 1j * rng.uniform(-0.5, 0.5, 8 * n)
    return z[q.puncture_distance(z) > clearance][:n]


# -- configurations and parameters ----------------------------------------------

def test_configuration_projects_sum():
    assert QGEN.x2 == -(QGEN.x0 + QGEN.x1)
    assert sum(QGEN.points) == 0


def test_configuration_sum_checked_by_from_points():
    with pytest.raises(InvalidConfiguration):
        Configuration.from_points(0.1, 0.2, 0.3, L)
    q = Configuration.from_points(0.1, 0.2j, -0.1 - 0.2j, L)
    assert q.x2 == -0.1 - 0.2j


@pytest.mark.parametrize("x0,x1", [(0.2, 0.2), (0.0, 0.3j), (1.2, 0.2), (0.3, -0.15), (0.3, -0.3 + 1j)])
def test_singular_configurations_rejected(x0, x1):
    with pytest.raises(InvalidConfiguration):
        Configuration(x0, x1, L)


@pytest.mark.parametrize("alpha", [0, 0.5, 1 / 3, -2 / 3, 1, 2.5, 0.5 + 1e-11])
def test_alpha_excluded(alpha):
    with pytest.raises(InvalidAlpha):
        AlphaParam(alpha)


def test_alpha_c():
    a = AlphaParam(0.3 + 0.1j)
    assert abs(a.c - cmath.exp(2j * math.pi * (0.3 + 0.1j))) < 1e-15


# -- g and dlog g ----------------------------------------------------------------

def test_g_is_half_wp_prime_at_q012():
    t = far_points(Q012, 20, 1)
    g = g_value(t, Q012)
    ref = wp_prime(t, L) / 2
    assert np.max(np.abs(g - ref) / np.abs(ref)) < 1e-9
    assert abs(g_value(0.2 + 0.3j, Q012) - wp_prime(0.2 + 0.3j, L) / 2) < 1e-9 * abs(wp_prime(0.2 + 0.3j, L))


def test_g_elliptic():
    t = far_points(QGEN, 20, 2)
    for w in (L.omega1, L.omega2):
        a, b = g_value(t, QGEN), g_value(t + w, QGEN)
        assert np.max(np.abs(a - b) / np.abs(a)) < 1e-10


def test_g_leading_coefficient_at_origin():
    for t in (1e-3, 1e-4 * (1 + 1j)):
        assert abs(t ** 3 * g_value(t, QGEN) + 1) < 10 * abs(t)


def test_g_pole_guard():
    with pytest.raises(PoleOrZero):
        g_value(QGEN.x1, QGEN)
    with pytest.raises(PoleOrZero):
        dlog_g(1j, QGEN)


def test_dlog_matches_finite_difference():
    t = 0.37 + 0.21j
    h = 1e-5
    fd = (cmath.log(g_value(t + h, QGEN)) - cmath.log(g_value(t - h, QGEN))) / (2 * h)
    assert abs(fd - dlog_g(t, QGEN)) < 1e-6 * max(1, abs(fd))


def test_dlog_periodic_and_wp_ratio():
    t = far_points(QGEN, 10, 3)
    assert np.max(np.abs(dlog_g(t + L.omega2, QGEN) - dlog_g(t, QGEN))) < 1e-9
    t = far_points(Q012, 20, 4)
    ref = wp_double_prime(t, L) / wp_prime(t, L)
    assert np.max(np.abs(dlog_g(t, Q012) - ref) / np.abs(ref)) < 1e-9


# -- continuation ----------------------------------------------------------------

def test_constant_path_keeps_state():
    b = QGEN.root_branch
    assert continue_log_g(CurvePath.constant(b.basepoint), QGEN, b) == b


def test_branch_state_matches_g():
    b = QGEN.root_branch
    assert abs(cmath.exp(b.log_g) - g_value(b.basepoint, QGEN)) < 1e-10 * abs(g_value(b.basepoint, QGEN))


@pytest.mark.parametrize("k,expected", [(0, 1), (1, 1), (2, 1)])
def test_loop_around_single_puncture(k, expected):
    x = QGEN.points[k]
    r = 0.3 * QGEN.min_separation
    start = x + r
    b = BranchState(start, cmath.log(g_value(start, QGEN)))
    end = continue_log_g(CurvePath.circle(x, start), QGEN, b)
    assert abs(end.log_g - b.log_g - expected * TWO_PI_I) < 1e-10
    # the branch of g^alpha picks up c
    a = AlphaParam(0.3 + 0.1j)
    ratio = g_alpha(start, end, a) / g_alpha(start, b, a)
    assert abs(ratio - a.c) < 1e-8


def test_loop_around_origin_is_minus_three():
    r = 0.3 * QGEN.min_separation
    assert abs(monodromy_log_increment(0, r, QGEN) + 3 * TWO_PI_I) < 1e-10


@pytest.mark.parametrize("q", [QGEN, Q012, Configuration(0.31 - 0.05j, 0.12 + 0.44j, L)])
def test_abelian_integrals_vanish(q):
    for i in (1, 2):
        assert abs(abelian_integral_I(i, q)) < 1e-10


@pytest.mark.parametrize("i", [1, 2])
def test_abelian_integral_with_broken_sum(i):
    # Shifting x0 by delta adds zeta(t - x0 - delta) - zeta(t - x0); over a period
    # its integral is -(eta_i) * delta by quasi-periodicity of log sigma.
    delta = 0.004 - 0.003j
    pts = (QGEN.x0 + delta, QGEN.x1, QGEN.x2)
    val = abelian_integral_I(i, QGEN, points=pts)
    assert abs(val - (-L.eta(i) * delta)) < 1e-8


def test_functoriality_and_reversal():
    b = QGEN.root_branch
    t0 = b.basepoint
    p1 = CurvePath.through([t0, t0 + 0.05, t0 + 0.05 + 0.04j])
    p2 = CurvePath.through([t0 + 0.05 + 0.04j, t0 + 0.02j])
    two = continue_log_g(p2, QGEN, continue_log_g(p1, QGEN, b))
    one = continue_log_g(p1 + p2, QGEN, b)
    assert abs(two.log_g - one.log_g) < 1e-12
    back = continue_log_g((p1 + p2).reversed(), QGEN, one)
    assert abs(back.log_g - b.log_g) < 1e-12 and back.basepoint == t0


def test_alpha_one_is_single_valued():
    # AlphaParam excludes alpha = 1, so the exponent is applied directly
    b = QGEN.root_branch
    t = b.basepoint
    assert abs(cmath.exp(1 * b.log_g) - g_value(t, QGEN)) < 1e-12 * abs(g_value(t, QGEN))


def test_modulus_of_real_power():
    b = QGEN.root_branch
    t0 = b.basepoint
    a = AlphaParam(0.3)
    for w in (0.1, 0.07j, -0.05 + 0.03j):
        st_ = continue_log_g(CurvePath.through([t0, t0 + w]), QGEN, b)
        lhs = abs(g_alpha(t0 + w, st_, a))
        rhs = abs(g_value(t0 + w, QGEN)) ** 0.3
        assert abs(lhs - rhs) < 1e-12 * rhs


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([0, 1, 2, 3]), st.floats(0.1, 0.45), st.floats(0, 2 * math.pi), st.booleans())
def test_random_small_loops(k, rfrac, theta, ccw):
    centers = (QGEN.x0, QGEN.x1, QGEN.x2, 0j)
    expected = (1, 1, 1, -3)[k] * (1 if ccw else -1)
    r = rfrac * QGEN.min_separation
    sweep = 2 * math.pi if ccw else -2 * math.pi
    path = CurvePath((Arc(complex(centers[k]), r, theta, sweep),))
    start = path.start
    b = BranchState(start, cmath.log(g_value(start, QGEN)))
    end = continue_log_g(path, QGEN, b)
    assert abs(end.log_g - b.log_g - expected * TWO_PI_I) < 1e-10


def test_path_clearance_enforced():
    b = QGEN.root_branch
    path = CurvePath.through([b.basepoint, QGEN.x1])
    with pytest.raises(ClearanceViolation):
        continue_log_g(path, QGEN, b)


# -- the cut domain --------------------------------------------------------------

def test_in_cut_domain_examples():
    x0 = QGEN.x0
    assert not in_cut_domain(x0 / 2, QGEN)
    clearance = 1e-6
    normal = 1j * x0 / abs(x0)
    p = x0 / 2 + 10 * clearance * normal
    d = min(float(point_segment_distance(p + w, 0, x))
            for x in QGEN.points for w in (0, 1, -1, 1j, -1j))
    assert d > clearance
    assert in_cut_domain(p, QGEN)
    assert in_cut_domain(QGEN.basepoint, QGEN)


def test_section_is_periodic_and_consistent():
    b = QGEN.root_branch
    s = section_log(b.basepoint, QGEN)
    assert abs(s.log_g - b.log_g) < 1e-12
    p = QGEN.basepoint + 0.21 - 0.13j
    assert in_cut_domain(p, QGEN)
    v = section_log(p, QGEN).log_g
    for w in (L.omega1, L.omega2):
        assert abs(section_log(p + w, QGEN).log_g - v) < 1e-9


def test_section_rejects_points_on_cuts():
    with pytest.raises(ClearanceViolation):
        section_log(QGEN.x0 / 2, QGEN)
