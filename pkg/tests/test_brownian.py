"""Brownian moment, maximal and occupation checks."""

import numpy as np
import pytest

from fbmcurrents.brownian import (BesselMomentCase, bessel_moment_estimates, maximal_exceedance,
                                  occupation_condition, occupation_integral_estimate, radial_moment)
from fbmcurrents.montecarlo import stderr_ratio


@pytest.mark.parametrize("d", [1, 2, 3, 5])
@pytest.mark.parametrize("x", [0.0, 0.7, 3.0])
def test_radial_moment_even_powers(d, x):
    t = np.array([0.25, 1.0, 2.0])
    assert np.allclose(radial_moment(x, t, d, 2), x**2 + d * t, rtol=1e-12)
    four = (x**2 + d * t) ** 2 + 2 * d * t**2 + 4 * t * x**2
    assert np.allclose(radial_moment(x, t, d, 4), four, rtol=1e-12)


def test_radial_moment_edge_cases():
    assert radial_moment(2.0, np.array([0.0]), 3, -1)[0] == pytest.approx(0.5)
    assert np.isinf(radial_moment(1.0, np.array([0.5]), 3, -3)[0])
    # E|W_t|^-1 in d = 3 is sqrt(2 / (pi t))
    assert radial_moment(0.0, np.array([2.0]), 3, -1)[0] == pytest.approx(np.sqrt(1 / np.pi))
    mc = np.linalg.norm(np.array([1.0, 0, 0]) + np.random.default_rng(0).standard_normal((400_000, 3)), axis=1)
    assert np.mean(mc**-1.5) == pytest.approx(radial_moment(1.0, np.array([1.0]), 3, -1.5)[0], rel=1e-2)


def test_theta_one_is_exact():
    r = bessel_moment_estimates(BesselMomentCase(3, 1.0, 3.0, (1.0, 0, 0), n_paths=300, n_steps=200),
                                threads=1)
    assert r.lhs.mean == pytest.approx(1.0)
    assert r.lhs.stderr == 0.0


def test_divergent_third_term_is_flagged():
    c = BesselMomentCase(3, 0.5, 2.0, (1.0, 0.0, 0.0), n_paths=500, n_steps=200)
    r = bessel_moment_estimates(c, threads=1)
    assert any("divergent" in f for f in r.flags)
    assert np.isinf(r.exact_terms[2])
    assert np.isfinite(r.lhs.mean) and r.lhs.stderr < 0.05 * r.lhs.mean


def test_finite_case_ratio():
    c = BesselMomentCase(3, 0.5, 1.5, (1.0, 0.0, 0.0), n_paths=1000, n_steps=400)
    r = bessel_moment_estimates(c, threads=1)
    assert np.all(np.isfinite(r.exact_terms))
    assert 0 < r.ratio < np.inf
    assert r.rhs_terms[0].within(r.exact_terms[0], 4)


def test_far_start_slope():
    # from far away the occupation integral behaves like |x|^(-2(1-theta))
    vals = [bessel_moment_estimates(BesselMomentCase(3, 0.5, 2.0, (x, 0.0, 0.0), n_paths=500, n_steps=200,
                                                     seed=1), threads=1).lhs.mean for x in (8.0, 16.0)]
    assert np.log(vals[1] / vals[0]) / np.log(2) == pytest.approx(-1.0, abs=0.1)


@pytest.mark.parametrize("kw,msg", [
    (dict(d=1, theta=0.5, q=2.0, x=(1.0,)), "d >= 2"),
    (dict(d=3, theta=0.5, q=1.0, x=(1.0, 0, 0)), "q > 1"),
    (dict(d=3, theta=0.5, q=2.0, x=(1.0, 0)), "components"),
])
def test_case_validation(kw, msg):
    with pytest.raises(ValueError, match=msg):
        BesselMomentCase(**kw)


def test_exceedance_within_bound():
    rows = maximal_exceedance((2.0, 4.0, 8.0), d=2, n_paths=4000, n_steps=500, seed=3, threads=1)
    assert all(r.within for r in rows)
    assert rows[0].frequency >= rows[1].frequency >= rows[2].frequency


def test_occupation_condition():
    assert occupation_condition(2, 1.8, 1.5)
    assert not occupation_condition(3, 2.0, 2.0)
    with pytest.raises(ValueError):
        occupation_integral_estimate(1, 2.0, 2.0)


def test_occupation_stable_under_more_samples():
    small = occupation_integral_estimate(2, 1.8, 1.5, n_paths=1000, seed=1, n_steps=200, threads=1)
    large = occupation_integral_estimate(2, 1.8, 1.5, n_paths=2000, seed=2, n_steps=200, threads=1)
    assert small.condition and not small.flags
    assert stderr_ratio(small.estimate, large.estimate) == pytest.approx(1.0, abs=0.2)
    assert abs(small.estimate.mean - large.estimate.mean) < 4 * np.hypot(small.estimate.stderr,
                                                                         large.estimate.stderr)
