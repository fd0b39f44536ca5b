import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lislab.distributions import BorderlinePowerLog, Explicit, FiniteUniform, Geometric, Poisson, PowerLog
from lislab.errors import DomainError, NoInterpolation
from lislab.variational import (
    SolverConfig,
    asymptotic_prediction,
    g,
    scales,
    second_moment_sum,
    series,
    solve_f,
    solve_mu,
    solve_nu,
    solve_r,
    solve_w,
)

ONE = Explicit([(1, 1.0)])
FAMILIES = [Geometric(0.5), Poisson(1.0), FiniteUniform(4), PowerLog(2.2, 0.0), PowerLog(1.5, 1.0),
            BorderlinePowerLog(-3.0), ONE, Explicit([(1, 0.2), (2, 0.5), (3, 0.3)])]


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(sum_tolerance=0)
    with pytest.raises(ValueError):
        SolverConfig(max_iterations=5)


def test_g_examples():
    assert g(FiniteUniform(2), 1.0, 0.5) == pytest.approx(1.5, abs=1e-15)
    assert g(ONE, 4.0, 0.25) == pytest.approx(1.8, abs=1e-15)
    direct = 10 + math.fsum(2.0**-i / (2.0**-i + 1) for i in range(1, 61))
    assert g(Geometric(0.5), 10.0, 1.0) == pytest.approx(direct, abs=1e-9)
    with pytest.raises(DomainError):
        g(ONE, 1.0, 0.0)


def test_heavy_tail_series_against_direct_sum():
    # partial sums out to 4e6 terms plus an integral tail estimate
    d = PowerLog(2.2, 0.0)
    a = 1e-3
    p = d.masses(4_000_000)
    N = len(p)
    direct = math.fsum(p / (p + a)) + d.c * N**-1.2 / 1.2 / a
    assert series(d, a).value == pytest.approx(direct, rel=1e-9)


def test_single_atom_closed_forms():
    assert solve_w(ONE, 4.0).value == pytest.approx(2 * math.sqrt(2) - 2, abs=1e-8)
    r = solve_f(ONE, 4.0)
    assert r.value == pytest.approx(1.0, abs=1e-8)
    assert r.boundary and r.argmin_alpha == pytest.approx(1e-8 / 4.0)
    assert solve_f(ONE, 0.25).value == pytest.approx(0.75, abs=1e-8)


def test_finite_uniform_w():
    assert solve_w(FiniteUniform(2), 2.0).value == pytest.approx(1.0, abs=1e-8)
    for m, t in [(3, 5.0), (10, 1000.0)]:
        exact = (-t / m + math.sqrt(t * t / m / m + 4 * t)) / 2
        assert solve_w(FiniteUniform(m), t).value == pytest.approx(exact, abs=1e-8)


def test_solve_r_examples():
    assert solve_r(Geometric(0.5), 100) == 5
    assert solve_r(Geometric(0.5), 1.5) == 0
    assert solve_r(FiniteUniform(4), 16) == 4
    assert solve_r(FiniteUniform(4), 1e9) == 4


@pytest.mark.parametrize("d", FAMILIES, ids=repr)
@pytest.mark.parametrize("t", [10.0, 1e3, 1e6])
def test_certificates_and_residuals(d, t):
    cfg = SolverConfig()
    f = solve_f(d, t, cfg)
    w = solve_w(d, t, cfg)
    assert f.value > 0 and w.value > 0
    assert g(d, t, f.argmin_alpha) + f.truncation_bound >= f.value
    assert abs(w.extra["residual"]) <= 10 * cfg.sum_tolerance
    assert f.truncation_bound <= cfg.sum_tolerance
    assert f.value <= 2 * math.sqrt(t) + 1e-6
    assert w.value <= f.value <= 2 * w.value + 1e-6
    assert second_moment_sum(d, t, w.value) <= 4 + 1e-8


def test_mu_examples():
    assert solve_mu(Geometric(0.5), 8.0) == pytest.approx(2.0, rel=1e-7)
    n = 1e6
    # x 2^x = 1e6 sits 20% under log2(n) because of the log log n correction
    mu = solve_mu(Geometric(0.5), n)
    assert mu * 2**mu == pytest.approx(n, rel=1e-7)
    for p in (0.5, 0.2):
        big = 1e100
        assert solve_mu(Geometric(p), big) == pytest.approx(math.log(big) / abs(math.log(1 - p)), rel=0.05)
    d = PowerLog(2.0, 0.0)
    assert solve_mu(d, n) == pytest.approx((d.c * n) ** (1 / 3), rel=1e-7)
    with pytest.raises(NoInterpolation):
        solve_mu(ONE, 10.0)
    with pytest.raises(DomainError):
        solve_mu(Geometric(0.5), 1.0)


def test_nu_residual_and_heavy_tail_constant():
    d = Geometric(0.5)
    t = 1e4
    nu = solve_nu(d, t)
    assert nu * nu / d.integral_tail(nu) == pytest.approx(t, rel=1e-7)
    b = BorderlinePowerLog(-1.5)
    n = 1e8
    c2 = math.sqrt(b.tail_constant * 2.0 ** (-b.gamma - 1))
    assert solve_nu(b, n) == pytest.approx(c2 * math.sqrt(n * math.log(n) ** (b.gamma + 1)), rel=0.15)
    with pytest.raises(NoInterpolation):
        solve_nu(ONE, 10.0)


@pytest.mark.parametrize("d", [Geometric(0.5), Poisson(1.0), PowerLog(2.2, 0.0), BorderlinePowerLog(-3.0)],
                         ids=repr)
def test_envelope_lemma(d):
    for n in (1e4, 1e6):
        s = scales(d, n)
        assert math.floor(s["mu"]) <= s["r"]
        assert s["f"] <= 3 * s["nu"] + 1e-6


def test_nu_mu_comparison():
    d = PowerLog(2.2, 0.0)
    for t in (1e6, 1e8):
        assert solve_nu(d, t) <= solve_mu(d, 1.1 * t / 1.2)


def test_asymptotic_predictions():
    assert asymptotic_prediction(Geometric(0.5), 1e6) == pytest.approx(19.93, abs=0.01)
    assert asymptotic_prediction(Poisson(3.0), 1e6) == pytest.approx(5.261, abs=1e-3)
    d = PowerLog(2.0, 0.0)
    assert asymptotic_prediction(d, 1e6) == pytest.approx((d.c * 1e6) ** (1 / 3), rel=1e-12)
    assert asymptotic_prediction(ONE, 10) is None


def test_scales_keys():
    s = scales(Geometric(0.5), 1e6)
    assert set(s) == {"t", "f", "alpha_star", "w", "r", "mu", "nu", "asymptotic", "truncation_bound"}
    assert scales(ONE, 4.0)["mu"] is None


@settings(max_examples=30, deadline=None)
@given(t=st.floats(0.5, 1e7), eps=st.sampled_from([0.1, 0.5, 1.0]))
def test_f_subadditive_in_scale(t, eps):
    d = Poisson(2.0)
    assert solve_f(d, t * (1 + eps)).value <= (1 + eps) * solve_f(d, t).value + 1e-7


@settings(max_examples=30, deadline=None)
@given(t=st.floats(1.0, 1e7), eps=st.sampled_from([0.1, 0.5]))
def test_w_lower_scaling(t, eps):
    d = Geometric(0.3)
    assert (1 - eps) * solve_w(d, t).value <= solve_w(d, t * (1 - eps)).value + 1e-7


@settings(max_examples=25, deadline=None)
@given(masses=st.lists(st.floats(0.01, 1.0), min_size=1, max_size=8), t=st.floats(0.1, 1e5))
def test_explicit_f_against_grid(masses, t):
    tot = sum(masses)
    d = Explicit([(i + 1, m / tot) for i, m in enumerate(masses)])
    f = solve_f(d, t).value
    p = np.array([m / tot for m in masses])
    xs = np.concatenate([[0.0], np.geomspace(1e-9, 10 * math.sqrt(t) + 10, 4000)])
    grid = min(x + np.sum(t * p / (t * p + x)) for x in xs)
    assert f <= grid + 1e-9
    assert f >= grid - 1e-3 * grid
