"""Gaussian integration by parts against sampling and closed forms."""

import numpy as np
import pytest

from fbmcurrents.wick import (GaussianVectorSpec, char_function_check, char_function_moment,
                              check_gradient, random_psd, suite_cases, verify_wick)

COV2 = np.array([[1.0, 0.6], [0.6, 2.0]])


@pytest.mark.parametrize("case", range(5))
def test_suite_cases(case):
    name, spec, f, g, ell = suite_cases(0)[case]
    r = verify_wick(spec, f, g, ell, n_samples=200_000, seed=case, threads=1)
    assert r.zscore < 4, name


def test_linear_case_exact_with_moment_matching():
    spec = GaussianVectorSpec(COV2)
    r = verify_wick(spec, lambda z: z[:, 1], lambda z: np.stack([0 * z[:, 0], 1 + 0 * z[:, 0]], axis=1),
                    0, n_samples=50_000, moment_match=True)
    assert r.lhs.real == pytest.approx(0.6, abs=1e-10)
    assert r.rhs.real == pytest.approx(0.6, abs=1e-12)


def test_complex_exponential():
    spec = GaussianVectorSpec(COV2)
    t = np.array([0.5, -0.3])
    r = verify_wick(spec, lambda z: np.exp(1j * z @ t),
                    lambda z: 1j * t[None, :] * np.exp(1j * z @ t)[:, None], 1, n_samples=200_000)
    assert r.zscore < 4
    assert r.lhs == pytest.approx(char_function_moment(spec, t, 1), abs=5 * r.diff_stderr + 5e-3)


def test_char_function_quasi_monte_carlo():
    spec = GaussianVectorSpec(random_psd(3, np.random.default_rng(1)))
    cf = char_function_check(spec, [0.4, -0.2, 0.5], 0, n_samples=2**18)
    assert cf.rel_error < 1e-3


def test_char_function_closed_form_is_a_derivative():
    # E[Z_l e^{i<t,Z>}] = -i d/dt_l exp(-t C t / 2)
    spec = GaussianVectorSpec(COV2)
    t, h = np.array([0.7, -0.4]), 1e-6
    phi = lambda s: np.exp(-0.5 * s @ COV2 @ s)
    for ell in range(2):
        e = np.eye(2)[ell] * h
        fd = (phi(t + e) - phi(t - e)) / (2 * h)
        assert char_function_moment(spec, t, ell) == pytest.approx(-1j * fd, rel=1e-8)


def test_singular_covariance_is_sampled():
    spec = GaussianVectorSpec([[1.0, 1.0], [1.0, 1.0]])
    z = spec.sample(np.random.default_rng(0), 1000)
    assert np.allclose(z[:, 0], z[:, 1])


@pytest.mark.parametrize("cov,msg", [
    ([[1.0, 0.2], [0.3, 1.0]], "symmetric"),
    ([[1.0, 2.0], [2.0, 1.0]], "positive semidefinite"),
    ([[1.0, 0.0, 0.0]], "square"),
])
def test_bad_covariance(cov, msg):
    with pytest.raises(ValueError, match=msg):
        GaussianVectorSpec(cov)


def test_wrong_gradient_and_index():
    spec = GaussianVectorSpec(COV2)
    f = lambda z: z[:, 0] ** 2
    with pytest.raises(ValueError, match="finite differences"):
        verify_wick(spec, f, lambda z: np.stack([z[:, 0], 0 * z[:, 0]], axis=1), 0, n_samples=1000)
    with pytest.raises(ValueError, match="out of range"):
        verify_wick(spec, f, lambda z: np.stack([2 * z[:, 0], 0 * z[:, 0]], axis=1), 2, n_samples=1000)


def test_gradient_check_passes_for_correct_gradient():
    worst = check_gradient(lambda z: np.sin(z).sum(axis=1), np.cos, 3, np.random.default_rng(0))
    assert worst < 1e-8


def test_thread_count_does_not_change_result():
    name, spec, f, g, ell = suite_cases(0)[2]
    a = verify_wick(spec, f, g, ell, n_samples=300_000, seed=9, threads=1)
    b = verify_wick(spec, f, g, ell, n_samples=300_000, seed=9, threads=4)
    assert a == b
