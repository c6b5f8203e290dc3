"""Smoothed current functionals on deterministic paths, closed forms and sampled paths."""

import numpy as np
import pytest

from fbmcurrents.currents import (SpatialGrid, Z_double_integral, Z_over_alphas, eta_field,
                                  expected_Z_exact, mc_expected_Z, regularized_current, steps_for,
                                  threshold_sweep, trapezoid_weights, wick_decompose)
from fbmcurrents.montecarlo import MCResult, stderr_ratio
from fbmcurrents.paths import DerivScheme, FbmParams, FbmPath, discrete_derivative, sample_fbm


def line_path(n=400, eps_steps=4, d=1, H=0.5):
    p = FbmParams(H, d, 1.0, n, 0, eps_steps)
    t = np.arange(p.n_total + 1) * p.dt
    return FbmPath(p, np.tile(t, (d, 1)))


def fbm(H=0.5, d=3, eps=0.05, seed=0, per_eps=8):
    p = FbmParams(H, d, 1.0, steps_for(eps, 1.0, per_eps), seed).padded_for(eps)
    return sample_fbm(p)


def test_zero_path_has_zero_current():
    p = FbmParams(0.5, 3, 1.0, 64, 0, 8)
    path = FbmPath(p, np.zeros((3, p.n_total + 1)))
    sch = DerivScheme("symmetric", 8 * p.dt)
    assert Z_double_integral(path, 2.0, sch).value == 0.0


def test_constant_kernel_gives_squared_flux():
    path = fbm(d=2, eps=0.05, seed=4)
    sch = DerivScheme("symmetric", 0.05)
    D = discrete_derivative(path, sch)
    J = D @ trapezoid_weights(path.params.n_steps, path.params.dt)
    z = Z_double_integral(path, 2.0, sch, f=lambda r: np.full_like(r, 2.0))
    assert z.value == pytest.approx(2.0 * J @ J, rel=1e-12)


@pytest.mark.parametrize("kind", ["symmetric", "forward"])
def test_flux_tends_to_endpoint(kind):
    # int D X dt telescopes to window averages near T and 0, which tend to X_T
    n = 1024
    errs = []
    for k in (64, 16, 4):
        e = k / n
        sch = DerivScheme(kind, e)
        err = []
        for s in range(20):
            path = sample_fbm(FbmParams(0.5, 2, 1.0, n, s, 64))
            J = discrete_derivative(path, sch) @ trapezoid_weights(n, 1 / n)
            err.append(np.sum((J - path.values[:, n]) ** 2))
        errs.append(np.mean(err))
    assert errs[0] > errs[1] > errs[2]


def eta_line(x):
    # int_0^1 (1/2) e^{-|x - t|} dt
    x = np.asarray(x)
    inside = 0.5 * (2 - np.exp(-x) - np.exp(-(1 - x)))
    left = 0.5 * (np.exp(x) - np.exp(x - 1))
    right = 0.5 * (np.exp(-(x - 1)) - np.exp(-x))
    return np.where(x < 0, left, np.where(x > 1, right, inside))


def test_eta_on_straight_line():
    path = line_path()
    sch = DerivScheme("forward", 4 * path.params.dt)
    grid = SpatialGrid(np.array([-4.0]), 0.05, (181,))
    f = eta_field(path, 2.0, sch, grid=grid)
    x = grid.axes[0]
    assert np.max(np.abs(f.values[0] - eta_line(x))) < 1e-3
    # int eta^2 on the line equals Z with K_2 = (1 + r) e^{-r} / 4
    z = Z_double_integral(path, 2.0, sch).value
    assert f.norm2() == pytest.approx(z, rel=1e-2)


def test_eta_norm_matches_Z_on_fbm():
    path = fbm(d=3, eps=0.1, seed=2, per_eps=4)
    sch = DerivScheme("symmetric", 0.1)
    z = Z_double_integral(path, 2.0, sch).value
    f = eta_field(path, 2.0, sch, spacing=0.2, margin=4.0)
    assert abs(f.norm2() - z) <= 0.05 * z + f.tail_bound


def test_eta_rejects_small_box_and_low_order():
    path = line_path()
    sch = DerivScheme("forward", 4 * path.params.dt)
    with pytest.raises(ValueError, match="margin"):
        eta_field(path, 2.0, sch, grid=SpatialGrid(np.array([-1.0]), 0.05, (61,)))
    p3 = fbm(H=0.5, d=3, eps=0.1, per_eps=4)
    with pytest.raises(ValueError, match="threshold"):
        eta_field(p3, 0.4, DerivScheme("symmetric", 0.1))


def test_regularized_current_identity_field():
    # phi = 1 in d = 1: int D X dt is the telescoped flux
    path = sample_fbm(FbmParams(0.5, 1, 1.0, 512, 3, 8))
    sch = DerivScheme("forward", 8 / 512)
    v = regularized_current(path, np.ones_like, sch)
    J = discrete_derivative(path, sch) @ trapezoid_weights(512, 1 / 512)
    assert v == pytest.approx(float(J[0]), rel=1e-12)


def test_regularized_current_ito_and_stratonovich():
    # phi(x) = x: forward gives Ito X_T^2/2 - T/2, symmetric gives X_T^2/2
    n, k = 512, 4
    fw, sy = [], []
    for s in range(300):
        path = sample_fbm(FbmParams(0.5, 1, 1.0, n, s, k))
        XT = path.values[0, n]
        fw.append(regularized_current(path, lambda x: x, DerivScheme("forward", k / n)) - (XT**2 - 1) / 2)
        sy.append(regularized_current(path, lambda x: x, DerivScheme("symmetric", k / n)) - XT**2 / 2)
    for diffs in (fw, sy):
        assert abs(MCResult.from_samples(diffs).zscore(0.0)) < 4


def test_Z_decreases_in_alpha_per_path():
    sch = DerivScheme("symmetric", 0.05)
    for s in range(3):
        z = Z_over_alphas(fbm(seed=s), [1.2, 1.6, 2.0, 2.5], sch)
        assert np.all(np.diff(z) < 0)


def test_Z_below_threshold_warns_and_excludes_diagonal():
    with pytest.warns(RuntimeWarning, match="threshold"):
        z = Z_double_integral(fbm(H=0.5, d=3), 0.4, DerivScheme("symmetric", 0.05))
    assert "diagonal-excluded" in z.flags


def test_wick_decomposition_identity():
    path = fbm(seed=5, eps=0.1, per_eps=4)
    sch = DerivScheme("symmetric", 0.1)
    w = wick_decompose(path, 2.0, sch)
    assert w.A + w.B1 - w.B2 + w.Q == pytest.approx(w.Z, rel=1e-12)
    assert w.A > 0
    low = wick_decompose(path, 0.8, sch)
    assert low.B1 is None and low.Q is None


def test_wick_remainder_has_zero_mean():
    q = [wick_decompose(fbm(seed=s, eps=0.1, per_eps=4), 2.0, DerivScheme("symmetric", 0.1)).Q
         for s in range(150)]
    assert MCResult.from_samples(q).within(0.0, 4)


def test_expected_Z_threshold():
    assert not expected_Z_exact(0.5, 3, 0.4, "symmetric", 0.05).finite
    assert expected_Z_exact(0.5, 3, 0.4, "symmetric", 0.05).value == float("inf")
    r = expected_Z_exact(0.5, 3, 2.0, "symmetric", 0.05)
    assert r.finite and r.value > 0 and r.value == pytest.approx(r.interior + r.strip)


def test_expected_Z_matches_monte_carlo():
    ex = expected_Z_exact(0.5, 3, 2.0, "symmetric", 0.1).value
    mc = mc_expected_Z(0.5, 3, 2.0, "symmetric", 0.1, n_replicas=200, seed=11, threads=1)
    assert abs(mc.zscore(ex)) < 4


def test_mc_stderr_shrinks_like_root_n():
    small = mc_expected_Z(0.5, 3, 2.0, "symmetric", 0.1, n_replicas=200, seed=1, threads=1, per_eps=4)
    large = mc_expected_Z(0.5, 3, 2.0, "symmetric", 0.1, n_replicas=400, seed=2, threads=1, per_eps=4)
    assert stderr_ratio(small, large) == pytest.approx(1.0, abs=0.2)


def test_sweep_guards():
    with pytest.raises(ValueError, match="H >= 1/2"):
        threshold_sweep(0.3, 1, [1.0], [0.1, 0.05, 0.025, 0.0125], kind="forward")
    with pytest.raises(ValueError, match="at least 4"):
        threshold_sweep(0.5, 3, [2.0], [0.1, 0.05])


def test_sweep_separates_orders():
    eps = [2.0**-k for k in range(3, 10)]
    t = threshold_sweep(0.5, 3, [2.0, 1.0], eps)
    assert t.trends[2.0] == "bounded"
    assert t.trends[1.0] == "diverging"


def test_resolution_errors():
    p = FbmParams(0.5, 3, 1.0, 64, 0)
    path = sample_fbm(p)
    with pytest.raises(ValueError, match="grid steps"):
        Z_double_integral(path, 2.0, DerivScheme("symmetric", 2 / 64))
    with pytest.raises(ValueError, match="padded"):
        Z_double_integral(path, 2.0, DerivScheme("symmetric", 8 / 64))
    with pytest.raises(ValueError, match="multiple"):
        Z_double_integral(path, 2.0, DerivScheme("symmetric", 0.1))
