"""Gaussian integration by parts, checked numerically.

For a centred Gaussian vector ``Z`` with covariance ``C``

    E[Z_l f(Z)] = sum_j C_lj E[d_j f(Z)].

:func:`verify_wick` estimates both sides from one set of samples, so the
comparison is made on the per-sample difference and its noise is much smaller
than that of either side.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import stats
from scipy.stats import qmc

from .montecarlo import replica_rng, run_replicas

BATCH = 1 << 16


@dataclass(frozen=True)
class GaussianVectorSpec:
    cov: np.ndarray

    def __post_init__(self) -> None:
        c = np.atleast_2d(np.asarray(self.cov, dtype=float))
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError(f"covariance must be square, got shape {c.shape}")
        scale = max(1.0, float(np.max(np.abs(c))))
        if np.max(np.abs(c - c.T)) > 1e-12 * scale:
            raise ValueError("covariance is not symmetric")
        ev = np.linalg.eigvalsh(c)
        if ev.min() < -1e-10 * scale:
            raise ValueError(f"covariance is not positive semidefinite (eigenvalue {ev.min():.3g})")
        object.__setattr__(self, "cov", c)

    @property
    def N(self) -> int:
        return self.cov.shape[0]

    def factor(self) -> np.ndarray:
        """``L`` with ``L L^T = cov``; symmetric square root, valid for singular ``cov``."""
        ev, U = np.linalg.eigh(self.cov)
        return U * np.sqrt(np.clip(ev, 0.0, None))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.standard_normal((n, self.N)) @ self.factor().T


def random_psd(N: int, rng: np.random.Generator) -> np.ndarray:
    A = rng.standard_normal((N, N))
    return A @ A.T / N + 0.1 * np.eye(N)


@dataclass(frozen=True)
class WickReport:
    lhs: complex
    rhs: complex
    diff_stderr: float
    zscore: float
    n: int
    meta: dict = field(default_factory=dict, compare=False)


def check_gradient(f: Callable, grad_f: Callable, N: int, rng: np.random.Generator,
                   n_points: int = 10, rtol: float = 1e-4, h: float = 1e-5) -> float:
    """Worst relative mismatch between ``grad_f`` and central differences of ``f``.

    Raises when it exceeds ``rtol``.
    """
    z = rng.standard_normal((n_points, N))
    g = np.asarray(grad_f(z)).reshape(n_points, N)
    fd = np.empty_like(g)
    for j in range(N):
        e = np.zeros(N)
        e[j] = h
        fd[:, j] = (np.asarray(f(z + e)) - np.asarray(f(z - e))) / (2 * h)
    scale = max(float(np.max(np.abs(g))), 1e-12)
    worst = float(np.max(np.abs(g - fd)) / scale)
    if worst > rtol:
        raise ValueError(f"grad_f disagrees with finite differences of f (rel. {worst:.2e})")
    return worst


def _moment_matched(w: np.ndarray) -> np.ndarray:
    """Rescale standard normals so the batch mean is 0 and the batch covariance is I."""
    w = w - w.mean(axis=0)
    c = np.linalg.cholesky(w.T @ w / len(w))
    return np.linalg.solve(c, w.T).T


def verify_wick(spec: GaussianVectorSpec, f: Callable, grad_f: Callable, ell: int,
                n_samples: int = 10**6, seed: int = 0, threads: int | None = None,
                moment_match: bool = False) -> WickReport:
    """Both sides of the identity for component ``ell`` by Monte Carlo.

    ``f`` maps ``(n, N)`` samples to ``(n,)`` values (real or complex) and
    ``grad_f`` maps them to ``(n, N)``. The z-score is that of the mean
    per-sample difference; for complex ``f`` it is the larger of the real and
    imaginary z-scores.

    ``moment_match`` whitens each batch so its sample covariance is exact.
    Linear ``f`` then satisfies the identity to round-off, but the reported
    stderr is no longer an honest error bar.
    """
    if not 0 <= ell < spec.N:
        raise ValueError(f"index {ell} out of range for N={spec.N}")
    check_gradient(f, grad_f, spec.N, replica_rng(seed, 2**31))
    L = spec.factor()
    row = spec.cov[ell]
    sizes = [BATCH] * (n_samples // BATCH) + ([n_samples % BATCH] if n_samples % BATCH else [])

    def batch(rng, i):
        w = rng.standard_normal((sizes[i], spec.N))
        z = (_moment_matched(w) if moment_match else w) @ L.T
        lhs = z[:, ell] * np.asarray(f(z))
        rhs = np.asarray(grad_f(z)) @ row
        parts = [np.real(lhs), np.imag(lhs), np.real(rhs), np.imag(rhs)]
        dr, di = parts[0] - parts[2], parts[1] - parts[3]
        return np.array([p.sum() for p in parts] + [(dr**2).sum(), (di**2).sum()])

    acc = np.sum(run_replicas(batch, len(sizes), seed, threads), axis=0)
    n = float(n_samples)
    lhs = complex(acc[0], acc[1]) / n
    rhs = complex(acc[2], acc[3]) / n
    diff = lhs - rhs
    var_r = max(acc[4] / n - diff.real**2, 0.0) / (n - 1)
    var_i = max(acc[5] / n - diff.imag**2, 0.0) / (n - 1)
    se_r, se_i = np.sqrt(var_r), np.sqrt(var_i)
    z = [abs(d) / s if s > 0 else (0.0 if d == 0 else np.inf)
         for d, s in ((diff.real, se_r), (diff.imag, se_i))]
    return WickReport(lhs, rhs, float(np.hypot(se_r, se_i)), float(max(z)), n_samples)


# -- characteristic function ---------------------------------------------------

def char_function_moment(spec: GaussianVectorSpec, t: np.ndarray, ell: int) -> complex:
    """Closed form of ``E[Z_l exp(i <t, Z>)] = i (C t)_l exp(-t C t / 2)``."""
    t = np.asarray(t, dtype=float)
    return 1j * float(spec.cov[ell] @ t) * float(np.exp(-0.5 * t @ spec.cov @ t))


@dataclass(frozen=True)
class CharFunctionCheck:
    exact: complex
    estimate: complex
    rel_error: float
    n: int


def char_function_check(spec: GaussianVectorSpec, t, ell: int, n_samples: int = 2**20,
                        seed: int = 0) -> CharFunctionCheck:
    """Estimate ``E[Z_l exp(i <t, Z>)]`` by scrambled Sobol points mapped to Gaussians.

    Randomised quasi-Monte Carlo brings the error of this smooth integrand well
    below the ``n^-1/2`` of plain sampling at the same ``n``.
    """
    t = np.asarray(t, dtype=float)
    sob = qmc.Sobol(spec.N, scramble=True, seed=replica_rng(seed, 0))
    m = int(np.ceil(np.log2(n_samples)))
    u = sob.random_base2(m)
    z = stats.norm.ppf(u) @ spec.factor().T
    est = complex(np.mean(z[:, ell] * np.exp(1j * (z @ t))))
    exact = char_function_moment(spec, t, ell)
    return CharFunctionCheck(exact, est, abs(est - exact) / abs(exact), 2**m)


# -- built-in suite --------------------------------------------------------------

def _gauss_bump(z):
    return np.exp(-0.5 * np.sum(z**2, axis=-1))


def _gauss_bump_grad(z):
    return -z * _gauss_bump(z)[..., None]


def suite_cases(seed: int = 0) -> list[tuple[str, GaussianVectorSpec, Callable, Callable, int]]:
    """Pinned regression pairs ``(name, spec, f, grad_f, ell)``."""
    rng = replica_rng(seed, 2**32)
    cov3 = random_psd(3, rng)
    cov2 = np.array([[1.0, 0.6], [0.6, 2.0]])
    return [
        ("linear-1d", GaussianVectorSpec([[1.7]]), lambda z: z[:, 0],
         lambda z: np.ones_like(z), 0),
        ("cross-2d", GaussianVectorSpec(cov2), lambda z: z[:, 1],
         lambda z: np.stack([np.zeros(len(z)), np.ones(len(z))], axis=1), 0),
        ("bump-3d", GaussianVectorSpec(cov3), _gauss_bump, _gauss_bump_grad, 0),
        ("cubic-2d", GaussianVectorSpec(cov2), lambda z: z[:, 0] ** 2 * z[:, 1],
         lambda z: np.stack([2 * z[:, 0] * z[:, 1], z[:, 0] ** 2], axis=1), 1),
        ("sine-3d", GaussianVectorSpec(cov3), lambda z: np.sin(z @ np.array([0.3, -0.7, 1.1])),
         lambda z: np.cos(z @ np.array([0.3, -0.7, 1.1]))[:, None] * np.array([0.3, -0.7, 1.1]), 2),
    ]


def run_suite(n_samples: int = 10**6, seed: int = 0, threads: int | None = None) -> dict:
    """Reports for :func:`suite_cases` plus the characteristic-function case."""
    out = {}
    for k, (name, spec, f, g, ell) in enumerate(suite_cases(seed)):
        r = verify_wick(spec, f, g, ell, n_samples, seed + k, threads)
        out[name] = {"lhs": r.lhs.real, "rhs": r.rhs.real, "zscore": r.zscore, "n": r.n}
    spec = suite_cases(seed)[2][1]
    cf = char_function_check(spec, np.array([0.4, -0.2, 0.5]), 0, n_samples, seed)
    out["char-function"] = {"exact_re": cf.exact.real, "exact_im": cf.exact.imag,
                            "estimate_re": cf.estimate.real, "estimate_im": cf.estimate.imag,
                            "rel_error": cf.rel_error, "n": cf.n}
    return out
