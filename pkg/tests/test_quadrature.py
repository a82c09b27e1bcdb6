import numpy as np
import pytest

from elltwist.errors import EpsilonTooLarge, InvalidConfiguration
from elltwist.kernel import make_lattice
from elltwist.local_system import AlphaParam, Configuration, g_value, period_loop
from elltwist.picard_lefschetz import special_configuration
from elltwist.quadrature import (
    build_cycle,
    integrate,
    integrate_path,
    monodromy_ratios,
    numeric_report,
    period_integral,
    vanishing_limit,
)
from oracles import laurent_coefficients

L = make_lattice(1, 1j)
Q012 = special_configuration("012", L)
QGEN = Configuration(0.23 + 0.11j, -0.41 + 0.37j, L)
SEGMENTS = ("(01)", "(12)", "(20)")


def _strictly_inside(z, a, b, c):
    side = [((q - p).conjugate() * (z - p)).imag for p, q in ((a, b), (b, c), (c, a))]
    return all(x > 0 for x in side) or all(x < 0 for x in side)


def random_configurations(n, seed, min_sep=0.15):
    """Generic q: separated punctures, and the triangle x0 x1 x2 encloses no
    puncture translate other than 0 (otherwise the straight segments bound a
    different region and the relation acquires a loop term)."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        x0, x1 = rng.uniform(-0.5, 0.5, 2) + 1j * rng.uniform(-0.5, 0.5, 2)
        try:
            q = Configuration(x0, x1, L)
        except InvalidConfiguration:
            continue
        if q.min_separation <= min_sep:
            continue
        others = [p + m + 1j * k for p in (0j, *q.points) for m in range(-2, 3) for k in range(-2, 3)
                  if (m, k) != (0, 0)]
        if any(_strictly_inside(z, *q.points) for z in others):
            continue
        out.append(q)
    return out


# -- cycles ----------------------------------------------------------------------

def test_segment_cycle_shape():
    a = AlphaParam(0.3)
    cyc = build_cycle("(01)", QGEN, a, 0.02)
    assert cyc.kind == "segment" and len(cyc.pieces) == 3
    w = [p.weight for p in cyc.pieces]
    assert w[0] == pytest.approx(1 / (a.c - 1)) and w[1] == 1 and w[2] == pytest.approx(-1 / (a.c - 1))
    circ_i, seg, circ_j = (p.path for p in cyc.pieces)
    # circles are full loops based at the truncated segment's endpoints
    assert circ_i.start == pytest.approx(seg.start) and circ_i.end == pytest.approx(seg.start)
    assert circ_j.start == pytest.approx(seg.end) and circ_j.end == pytest.approx(seg.end)
    assert abs(seg.start - QGEN.x0) == pytest.approx(0.02)
    assert abs(seg.end - QGEN.x1) == pytest.approx(0.02)


def test_period_cycle_shape():
    cyc = build_cycle("w1", QGEN, AlphaParam(0.3))
    assert cyc.kind == "period" and len(cyc.pieces) == 1 and cyc.pieces[0].weight == 1
    loop = cyc.pieces[0].path
    assert loop.end - loop.start == pytest.approx(L.omega1)


def test_epsilon_too_large():
    with pytest.raises(EpsilonTooLarge):
        build_cycle("(12)", Q012, AlphaParam(0.3), 0.4)
    with pytest.raises(EpsilonTooLarge):
        build_cycle("(01)", Q012, AlphaParam(0.3), -0.01)


# -- integrals -------------------------------------------------------------------

@pytest.mark.parametrize("q", [QGEN, Q012])
@pytest.mark.parametrize("i", [1, 2])
def test_alpha_one_period_integral_against_laurent_oracle(q, i):
    # g = b0 + b_{-2} wp - (b_{-3}/2) wp', so its integral over a period is b0 w_i - b_{-2} eta_i
    r = 0.4 * q.min_separation
    b = laurent_coefficients(lambda t: g_value(t, q), 0, r, -3, 0)
    assert abs(b[-3] + 1) < 1e-10 and abs(b[-1]) < 1e-10
    expected = b[0] * L.period(i) - b[-2] * L.eta(i)
    loop = period_loop(i, q)
    res, _ = integrate_path(loop, q.root_branch, q, 1.0, tol=1e-12)
    assert abs(res.value - expected) < 1e-8


def test_branch_consistency_forward_backward():
    a = AlphaParam(0.3 + 0.1j)
    cyc = build_cycle("(20)", QGEN, a, 0.02)
    seg = cyc.pieces[1].path
    fwd, end = integrate_path(seg, cyc.branch, QGEN, a.alpha, tol=1e-13)
    back, home = integrate_path(seg.reversed(), end, QGEN, a.alpha, tol=1e-13)
    assert abs(fwd.value + back.value) < 1e-12
    assert abs(home.log_g - cyc.branch.log_g) < 1e-12


def test_integral_result_fields():
    a = AlphaParam(0.3)
    res = integrate(build_cycle("(01)", Q012, a), a)
    assert res.error_estimate >= 0 and res.evaluations > 0 and np.isfinite(res.value)


@pytest.mark.parametrize("alpha", [0.3, 0.3 + 0.1j])
def test_relation_and_eps_independence_at_q012(alpha):
    a = AlphaParam(alpha)
    F = {}
    for mu in SEGMENTS:
        vals = [period_integral(mu, Q012, a, e) for e in (0.02, 0.03, 0.05)]
        assert max(abs(v - vals[0]) for v in vals) < 1e-8 * max(1, abs(vals[0]))
        F[mu] = vals[0]
    assert abs(sum(F.values())) < 1e-6 * max(abs(v) for v in F.values())


@pytest.mark.parametrize("alpha", [0.3, 0.3 + 0.1j, -0.7])
def test_relation_and_eps_independence_random(alpha):
    a = AlphaParam(alpha)
    for q in random_configurations(5, 11):
        F = {}
        for mu in SEGMENTS:
            vals = [period_integral(mu, q, a, e) for e in (0.02, 0.03, 0.05)]
            assert max(abs(v - vals[0]) for v in vals) < 1e-8 * max(1, abs(vals[0]))
            F[mu] = vals[0]
        assert abs(sum(F.values())) < 1e-6 * max(abs(v) for v in F.values())


def test_straight_segment_matches_direct_quadrature():
    # plain composite Simpson on the truncated segment, branch fixed by the cycle
    a = AlphaParam(0.3)
    cyc = build_cycle("(01)", QGEN, a, 0.05)
    seg = cyc.pieces[1].path
    res, _ = integrate_path(seg, cyc.branch, QGEN, a.alpha, tol=1e-12)
    p, pe = seg.start, seg.end
    s = np.linspace(0, 1, 20001)
    t = p + s * (pe - p)
    g = g_value(t, QGEN)
    # unwrap log g along the segment starting from the branch value
    steps = np.log(g[1:] / g[:-1])
    logg = cyc.branch.log_g + np.concatenate([[0], np.cumsum(steps)])
    f = np.exp(a.alpha * logg) * (pe - p)
    h = s[1] - s[0]
    simpson = h / 3 * (f[0] + f[-1] + 4 * f[1:-1:2].sum() + 2 * f[2:-1:2].sum())
    assert abs(simpson - res.value) < 1e-7 * max(1, abs(res.value))


def test_monodromy_ratios():
    a = AlphaParam(0.3 + 0.1j)
    r = monodromy_ratios(QGEN, a)
    for name in ("x0", "x1", "x2"):
        assert abs(r[name] - a.c) < 1e-8
    assert abs(r["0"] - a.c ** -3) < 1e-8


# -- vanishing limit -------------------------------------------------------------

def test_vanishing_limit_decreases():
    mags = vanishing_limit("01:0,1", AlphaParam(0.3), (0.30, 0.40, 0.45, 0.48), L)
    assert all(b < a for a, b in zip(mags, mags[1:]))
    assert mags[-1] / mags[0] < 0.2


def test_vanishing_limit_generic_start():
    (m,) = vanishing_limit("02:1,0", AlphaParam(0.3), (0.0,), L)
    assert np.isfinite(m) and m > 1e-3


def test_vanishing_limit_rejects_s_beyond_half():
    with pytest.raises(ValueError):
        vanishing_limit("02:1,0", AlphaParam(0.3), (0.5,), L)


# -- report ----------------------------------------------------------------------

def test_numeric_report_passes_and_is_deterministic():
    a = AlphaParam(0.3)
    r1 = numeric_report(Q012, a)
    r2 = numeric_report(Q012, a)
    assert r1 == r2
    assert all(rec["pass"] for rec in r1), [rec for rec in r1 if not rec["pass"]]
    names = {rec["check"] for rec in r1}
    assert {"I1_residual", "I2_residual", "monodromy_0", "relation_residual", "legendre_residual"} <= names


def test_report_threshold_override_fails():
    recs = numeric_report(Q012, AlphaParam(0.3), thresholds={"relation": 1e-17})
    (rel,) = [r for r in recs if r["check"] == "relation_residual"]
    assert not rel["pass"]


def test_broken_configuration_never_reaches_report():
    with pytest.raises(InvalidConfiguration):
        Configuration.from_points(0.1, 0.2, 0.3, L)
