"""Bessel potential kernels against closed forms and the modified Bessel function."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from fbmcurrents.kernel import (KernelSpec, asymptotic_envelope, check_semigroup, eval_K,
                                eval_K_zero, gaussian_expectation_K,
                                gaussian_expectation_laplacian_K, kernel_table, kernel_values,
                                laplacian_K, loglog_slope, moment_table, normalization_integral,
                                radial_laplacian_fd)


def bessel_form(alpha, d, r):
    """``gamma * 2 (r/2)^nu K_nu(r)`` with ``nu = alpha - d/2``."""
    nu = alpha - d / 2
    gam = 1 / ((4 * np.pi) ** (d / 2) * special.gamma(alpha))
    return gam * 2 * (r / 2) ** nu * special.kv(nu, r)


def test_yukawa_d3():
    assert eval_K(KernelSpec(1.0, 3), 1.0) == pytest.approx(np.exp(-1) / (4 * np.pi), rel=1e-6)


def test_exponential_d1():
    assert eval_K(KernelSpec(1.0, 1), 2.0) == pytest.approx(0.5 * np.exp(-2), rel=1e-6)


@settings(max_examples=60, deadline=None)
@given(alpha=st.floats(0.3, 4.0), d=st.integers(1, 3), r=st.floats(0.02, 20.0))
def test_matches_bessel_function(alpha, d, r):
    assert eval_K(KernelSpec(alpha, d), r) == pytest.approx(bessel_form(alpha, d, r), rel=1e-7)


@pytest.mark.parametrize("alpha,d,expected,rounded", [
    (1.0, 1, 0.5, 0.5),
    (2.0, 3, np.sqrt(np.pi) / (4 * np.pi) ** 1.5, 0.039789),
])
def test_value_at_origin(alpha, d, expected, rounded):
    assert eval_K_zero(KernelSpec(alpha, d)) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(rounded, abs=1e-6)


def test_origin_divergent():
    with pytest.raises(ValueError, match="divergent"):
        eval_K_zero(KernelSpec(1.0, 2))


def test_regimes():
    assert KernelSpec(1.0, 3).regime == "subcritical"
    assert KernelSpec(1.0, 2).regime == "critical"
    assert KernelSpec(1.0, 1).regime == "supercritical"


def test_laplacian_d3_against_finite_differences():
    spec = KernelSpec(2.0, 3)
    fd = radial_laplacian_fd(lambda r: eval_K(spec, r), 1.0, 3)
    assert fd == pytest.approx(-laplacian_K(spec, 1.0), rel=1e-3)


def test_laplacian_d1_closed_form():
    # K_2 = (1 + r) e^-r / 4 and K_1 = e^-r / 2 in one dimension
    r = np.array([0.3, 1.0, 2.5])
    k2 = (1 + r) * np.exp(-r) / 4
    assert np.allclose([eval_K(KernelSpec(2.0, 1), x) for x in r], k2, rtol=1e-9)
    expected = np.exp(-r) / 2 - k2
    got = [laplacian_K(KernelSpec(2.0, 1), x) for x in r]
    assert np.allclose(got, expected, rtol=1e-8, atol=1e-14)


@pytest.mark.parametrize("alpha,d", [(1.0, 3), (2.0, 1), (1.5, 2)])
def test_decays_at_infinity(alpha, d):
    spec = KernelSpec(alpha, d)
    assert abs(laplacian_K(spec, 40.0)) < 1e-15
    assert eval_K(spec, 40.0) < np.exp(-40 / 8)


def test_table_matches_direct_evaluation():
    tab = kernel_table(1.7, 3)
    r = np.geomspace(1e-4, 50, 97)
    assert np.allclose(tab(r), bessel_form(1.7, 3, r), rtol=1e-6)


def test_vectorised_values():
    spec = KernelSpec(2.5, 2)
    r = np.array([0.1, 1.0, 4.0])
    assert np.allclose(kernel_values(spec, r), bessel_form(2.5, 2, r), rtol=1e-8)


def test_gaussian_mean_d1_closed_form():
    # E[e^{-sigma|N|}] = 2 e^{sigma^2/2} (1 - Phi(sigma)), so m = e^{sigma^2/2} erfc(sigma/sqrt2) / 2
    spec = KernelSpec(1.0, 1)
    for s in (0.2, 1.0, 3.0):
        ref = 0.5 * np.exp(s * s / 2) * special.erfc(s / np.sqrt(2))
        assert float(gaussian_expectation_K(spec, s)) == pytest.approx(ref, rel=1e-8)
    assert 0.5 * np.exp(0.5) * special.erfc(1 / np.sqrt(2)) == pytest.approx(0.26158, abs=1e-5)


def test_gaussian_mean_methods_agree():
    spec = KernelSpec(1.3, 3)
    s = np.array([0.05, 0.4, 2.0])
    assert np.allclose(gaussian_expectation_K(spec, s, "radial"),
                       gaussian_expectation_K(spec, s, "heat"), rtol=1e-6)


def test_moment_table_decreasing_and_continuous():
    mt = moment_table(2.0, 3)
    s = np.geomspace(1e-4, 5, 60)
    m = mt.mean(s)
    assert np.all(np.diff(m) < 0)
    assert m[0] == pytest.approx(eval_K_zero(KernelSpec(2.0, 3)), rel=1e-3)
    assert np.allclose(m, gaussian_expectation_K(KernelSpec(2.0, 3), s), rtol=1e-6)


def test_laplacian_mean_by_monte_carlo():
    spec = KernelSpec(2.0, 3)
    rng = np.random.default_rng(0)
    N = rng.standard_normal((200_000, 3))
    r = 0.7 * np.linalg.norm(N, axis=1)
    tab1, tab2 = kernel_table(1.0, 3), kernel_table(2.0, 3)
    vals = tab2(r) - tab1(r)
    ref = float(gaussian_expectation_laplacian_K(spec, 0.7))
    assert abs(vals.mean() - ref) < 4 * vals.std() / np.sqrt(len(vals))


@pytest.mark.parametrize("alpha,d", [(1.0, 1), (2.0, 3), (1.5, 2), (0.8, 3)])
def test_unit_mass(alpha, d):
    val, tail = normalization_integral(KernelSpec(alpha, d))
    assert val == pytest.approx(1.0, abs=1e-4)
    assert tail < 1e-6


@pytest.mark.parametrize("r", [0.0, 0.5, 1.0])
def test_semigroup_d1(r):
    chk = check_semigroup(1.0, 1, r)
    assert chk.residual < 1e-3
    if r == 1.0:
        assert chk.rhs == pytest.approx(0.5 * np.exp(-1), rel=1e-10)


def test_semigroup_at_origin_is_K_zero():
    chk = check_semigroup(2.0, 1, 0.0)
    assert chk.rhs == eval_K_zero(KernelSpec(2.0, 1))
    assert chk.residual < 1e-6


def test_semigroup_box_convergence():
    with pytest.warns(RuntimeWarning, match="small"):
        small = check_semigroup(1.0, 1, 0.5, box=2.0).residual
    res = [small] + [check_semigroup(1.0, 1, 0.5, box=b).residual for b in (4.0, 8.0)]
    assert res[0] > res[1] > res[2]


def test_power_law_near_origin():
    slope = loglog_slope(KernelSpec(1.0, 3), 1e-3, 1e-1)
    assert slope == pytest.approx(-1.0, abs=0.02)


def test_critical_log_growth():
    spec = KernelSpec(1.0, 2)
    r = np.array([1e-4, 1e-6])
    k = np.array([eval_K(spec, x) for x in r])
    rate = (k[1] - k[0]) / np.log(r[0] / r[1])
    assert rate == pytest.approx(1 / (2 * np.pi), rel=1e-3)


def test_supercritical_bounded():
    spec = KernelSpec(1.0, 1)
    assert eval_K(spec, 1e-6) == pytest.approx(0.5, rel=1e-5)


@pytest.mark.parametrize("alpha,d", [(1.0, 3), (1.0, 2), (2.0, 1)])
def test_envelope_brackets_kernel(alpha, d):
    spec = KernelSpec(alpha, d)
    r = np.geomspace(1e-3, 30, 50)
    lo, hi = asymptotic_envelope(spec, r)
    k = kernel_values(spec, r)
    assert np.all(lo <= k * (1 + 1e-12)) and np.all(k <= hi * (1 + 1e-12))


def test_cell_average_uniform_kernel_limit():
    # for a scale far below every kernel feature the cell average is K(0)
    tab = kernel_table(2.0, 3)
    assert float(tab.cell_average(np.array([1e-9]), 0.5)[0]) == pytest.approx(
        eval_K_zero(KernelSpec(2.0, 3)), rel=1e-6)
