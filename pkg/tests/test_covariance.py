"""Covariance atoms against high-precision closed forms and Monte Carlo."""

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fbmcurrents.covariance import (alpha_H, b_limit, bound_constants, condition_B_threshold,
                                    cov_exact, cov_table, moment_N, phi_limit, phi_psi_reference,
                                    reference_atoms)
from fbmcurrents.paths import DerivScheme, FbmParams, discrete_derivative, sample_fbm_batch


def mp_phi(H, x):
    mp.mp.dps = 50
    x = mp.mpf(x)
    return ((1 + x) ** (2 * H) + abs(1 - x) ** (2 * H) - 2) / x**2


@pytest.mark.parametrize("H,d,expected", [(0.5, 3, 1.5), (0.5, 1, 0.5), (0.25, 3, 2.5)])
def test_alpha_H(H, d, expected):
    assert alpha_H(H, d) == pytest.approx(expected)


@pytest.mark.parametrize("H,d,expected", [(0.5, 3, 0.5), (0.5, 1, 0.0)])
def test_threshold(H, d, expected):
    assert condition_B_threshold(H, d) == pytest.approx(expected)


@pytest.mark.parametrize("H", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_sobolev_order_above_threshold(H, d):
    assert alpha_H(H, d) > condition_B_threshold(H, d)


def test_gaussian_norm_moments():
    assert moment_N(2.0, 5) == pytest.approx(5.0)
    assert moment_N(0.0, 2) == pytest.approx(1.0)
    assert moment_N(1.0, 3) == pytest.approx(2 * np.sqrt(2 / np.pi), rel=1e-12)
    rng = np.random.default_rng(3)
    r = np.linalg.norm(rng.standard_normal((1_000_000, 3)), axis=1)
    assert abs(r.mean() - moment_N(1.0, 3)) < 4 * r.std() / 1000
    with pytest.raises(ValueError, match="divergent"):
        moment_N(-3.0, 3)


def test_brownian_disjoint_quotients_uncorrelated():
    at = cov_exact("symmetric", 0.5, np.array([0.9]), np.array([0.5]), 0.1)
    assert at.c[0] == pytest.approx(0.0, abs=1e-15)


def test_brownian_forward_future_increment():
    at = cov_exact("forward", 0.5, 0.9, 0.5, 0.1)
    assert float(at.b) == pytest.approx(0.0, abs=1e-15)
    assert float(at.b_s) == pytest.approx(1.0, rel=1e-12)


def test_reference_values():
    phi, psi, _ = phi_psi_reference(0.5, np.array([0.2, 0.7]))
    assert np.allclose(phi, 0.0, atol=1e-15) and np.allclose(psi, 1.0)
    for H in (0.3, 0.7):
        assert float(phi_psi_reference(H, 1.0)[0]) == pytest.approx(2 ** (2 * H) - 2, rel=1e-13)
    with pytest.raises(ValueError):
        phi_psi_reference(0.5, 0.0)


@settings(max_examples=60, deadline=None)
@given(H=st.floats(0.1, 0.9), k_tau=st.integers(0, 8), k_eps=st.integers(1, 12),
       kind=st.sampled_from(["symmetric", "forward"]))
def test_dd_atom_matches_closed_form(H, k_tau, k_eps, kind):
    tau, eps = 2.0**-k_tau, 2.0**-k_eps
    t0 = 1.0 + 2 * eps + tau
    at = cov_exact(kind, H, t0, t0 - tau, eps)
    x = 2 * eps / tau if kind == "symmetric" else eps / tau
    ref = float(mp.mpf(tau) ** (2 * H - 2) / 2 * mp_phi(H, x))
    scale = tau ** (2 * H - 2)
    assert abs(float(at.c) - ref) < 1e-12 * scale
    c_ref, _ = reference_atoms(kind, H, tau, eps)
    assert abs(float(c_ref) - ref) < 1e-12 * scale


def test_table_rows():
    rows = cov_table("symmetric", 0.3, [0.5, 0.25], [0.125, 0.0625])
    assert len(rows) == 4
    assert set(rows[0]) == {"tau", "eps", "c_exact", "c_reference", "b_exact", "b_reference"}
    for r in rows:
        assert r["c_exact"] == pytest.approx(r["c_reference"], rel=1e-10, abs=1e-14)


def test_symmetric_in_arguments():
    a = cov_exact("symmetric", 0.35, 0.7, 0.2, 0.05)
    b = cov_exact("symmetric", 0.35, 0.2, 0.7, 0.05)
    assert float(a.c) == pytest.approx(float(b.c), rel=1e-14)
    assert float(a.b) == pytest.approx(-float(b.b_s), rel=1e-14)


def test_boundary_strip_flag():
    at = cov_exact("symmetric", 0.5, np.array([0.03, 0.5]), np.array([0.5, 0.5]), 0.05)
    assert at.boundary.tolist() == [True, False]
    assert not bool(cov_exact("symmetric", 0.5, 0.03, 0.5, 0.05, floor=None).boundary)
    with pytest.raises(ValueError, match="precede"):
        cov_exact("symmetric", 0.5, -0.1, 0.5, 0.05)


def test_relative_coordinates_agree():
    s, tau, eps = 0.3, 1e-3, 0.05
    a = cov_exact("symmetric", 0.4, s + tau, s, eps)
    b = cov_exact("symmetric", 0.4, tau, 0.0, eps, floor=-s)
    assert float(a.c) == pytest.approx(float(b.c), rel=1e-9)


def test_phi_limit_is_taylor_value():
    for H in (0.3, 0.7):
        lim = phi_limit(H)
        assert lim["measured"] == pytest.approx(lim["taylor"], rel=1e-6)
        assert lim["measured"] != pytest.approx(lim["stated"], rel=1e-2)


def test_b_limits():
    # half of the symmetric stencil overlaps the increment: the limit is H tau^(2H-1)
    for H in (0.3, 0.5, 0.7):
        lim = b_limit("symmetric", H, tau=0.5)
        assert lim["b_t"] == pytest.approx(0.5 * lim["stated"], rel=1e-7)
    assert b_limit("forward", 0.3)["b_t"] == float("inf")
    fw = b_limit("forward", 0.7, tau=0.5)
    assert fw["b_s"] == pytest.approx(0.5 * fw["stated"], rel=1e-8)
    fw = b_limit("forward", 0.5)
    assert fw["b_t"] == pytest.approx(0.0, abs=1e-10)
    assert fw["b_s"] == pytest.approx(1.0, rel=1e-10)


def test_bound_constants_finite():
    cc, cb = bound_constants("symmetric", 0.3, np.geomspace(1e-3, 1, 10), np.geomspace(1e-3, 0.3, 8))
    assert np.isfinite(cc) and np.isfinite(cb) and cc > 0 and cb > 0


@pytest.mark.parametrize("kind", ["symmetric", "forward"])
def test_quotients_by_monte_carlo(kind):
    eps, n = 0.0625, 64
    p = FbmParams(0.3, 1, 1.0, n, seed=21).padded_for(eps)
    D = np.stack([discrete_derivative(q, DerivScheme(kind, eps))[0]
                  for q in sample_fbm_batch(p, 4000, threads=1)])
    for t, s in ((32, 32), (32, 28), (2, 2), (48, 8)):
        prod = D[:, t] * D[:, s]
        ex = float(cov_exact(kind, 0.3, t / n, s / n, eps).c)
        assert abs(prod.mean() - ex) < 4 * prod.std() / np.sqrt(len(prod))
