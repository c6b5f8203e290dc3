"""Regularized currents of sampled paths and the double integral Z.

For a path ``X`` and a difference quotient ``D X`` of width ``eps``

    Z_{alpha,eps} = int int K_alpha(X_t - X_s) <D X_t, D X_s> dt ds
                  = || int K_{alpha/2}(. - X_t) D X_t dt ||^2_{L^2},

and its expectation is computed two independent ways: by Monte Carlo over
sampled paths, and deterministically through the Gaussian integration-by-parts
formula

    E Z = int int  d c(t,s) m_alpha(tau^H) + b_t b_s E[Laplacian K_alpha(tau^H N)]  dt ds

with ``c``, ``b_t``, ``b_s`` from :mod:`fbmcurrents.covariance`.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special
from scipy.spatial.distance import pdist

from .covariance import CovarianceAtoms, alpha_H, condition_B_threshold, cov_exact
from .kernel import KernelSpec, kernel_table, moment_table
from .montecarlo import MCResult, run_replicas
from .paths import DerivScheme, FbmParams, FbmPath, discrete_derivative, sample_fbm

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CurrentEstimate:
    alpha: float
    scheme: DerivScheme
    value: float
    n_steps: int
    diagonal: float  # contribution of the t = s cells
    boundary: str = "truncate"
    replica: int | None = None
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class WickTerms:
    A: float
    B1: float | None
    B2: float
    Q: float | None
    Z: float


def trapezoid_weights(n_steps: int, dt: float) -> np.ndarray:
    w = np.full(n_steps + 1, dt)
    w[0] = w[-1] = 0.5 * dt
    return w


def _check_resolution(path: FbmPath, scheme: DerivScheme, min_steps: int = 4) -> None:
    k = scheme.steps(path.params.dt)
    if k < min_steps:
        raise ValueError(f"eps={scheme.eps} spans {k} grid steps; need at least {min_steps}")
    if path.params.pad_steps < k:
        raise ValueError("path is not padded past T by eps; sample with params.padded_for(eps)")


@dataclass(frozen=True)
class _PairData:
    r: np.ndarray          # condensed pairwise distances, j < k
    gram: np.ndarray       # <D_j, D_k>, same order
    w_pair: np.ndarray     # w_j w_k
    diag_gram: np.ndarray  # |D_k|^2
    diag_w: np.ndarray     # w_k^2
    ell: np.ndarray        # local step length per node


def _pair_data(path: FbmPath, scheme: DerivScheme) -> _PairData:
    p = path.params
    X = path.on_horizon()
    D = discrete_derivative(path, scheme)
    w = trapezoid_weights(p.n_steps, p.dt)
    iu = np.triu_indices(p.n_steps + 1, k=1)
    G = D.T @ D
    steps = np.linalg.norm(np.diff(X, axis=1), axis=0)
    ell = np.append(steps, steps[-1])
    # end cells have half the width, hence the displacement scale 2^-H
    ell[[0, -1]] *= 0.5**p.H
    return _PairData(pdist(X.T), G[iu], np.outer(w, w)[iu], np.diag(G).copy(), w**2, ell)


def _diag_kernel(alpha: float, d: int, H: float, ell: np.ndarray) -> tuple[np.ndarray, bool]:
    """Cell-averaged kernel on the diagonal; ``(values, excluded)``."""
    if H * (2 * alpha - d) <= -1:
        return np.zeros_like(ell), True
    return kernel_table(alpha, d).cell_average(ell, H), False


def Z_double_integral(path: FbmPath, alpha: float, scheme: DerivScheme,
                      f: Callable[[np.ndarray], np.ndarray] | None = None,
                      _pairs: _PairData | None = None) -> CurrentEstimate:
    """Double trapezoidal sum for ``Z_{alpha,eps}`` on the path's time grid.

    A diagonal cell holds ``K`` averaged over the cell, with the displacement
    over a lag ``u`` of the cell modelled as ``ell (u/h)^H``. ``ell`` is the
    observed step at that node. This is finite exactly when ``K_alpha(X_t - X_s)``
    is integrable in expectation. Below that threshold the diagonal is
    excluded and flagged.

    ``f`` replaces ``K_alpha`` by a generic radial function; it is then
    evaluated at the sub-cell offsets by Gauss-Legendre quadrature.
    """
    _check_resolution(path, scheme)
    p = path.params
    pd = _pairs if _pairs is not None else _pair_data(path, scheme)
    flags: list[str] = []
    if f is None:
        kv = kernel_table(alpha, p.d)(pd.r)
        kd, excluded = _diag_kernel(alpha, p.d, p.H, pd.ell)
        if excluded:
            warnings.warn(f"alpha={alpha} is below the integrability threshold; "
                          "diagonal cells excluded", RuntimeWarning, stacklevel=2)
            flags.append("diagonal-excluded")
    else:
        kv = f(pd.r)
        kd = _cell_average_generic(f, pd.ell, p.H)
    off = 2.0 * np.dot(pd.w_pair * pd.gram, kv)
    diag = float(np.dot(pd.diag_w * pd.diag_gram, kd))
    return CurrentEstimate(alpha, scheme, float(off + diag), p.n_steps, diag,
                           replica=path.replica, flags=tuple(flags))


_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def _cell_average_generic(f, ell: np.ndarray, H: float) -> np.ndarray:
    v = 0.5 * (_GL_X + 1)
    wv = 0.5 * _GL_W * 2 * (1 - v)
    return f(ell[:, None] * v[None, :] ** H) @ wv


def Z_over_alphas(path: FbmPath, alphas: Sequence[float], scheme: DerivScheme) -> np.ndarray:
    """``Z_{alpha,eps}`` for several orders, sharing the pair geometry."""
    pd = _pair_data(path, scheme)
    return np.array([Z_double_integral(path, a, scheme, _pairs=pd).value for a in alphas])


# -- regularized integral ---------------------------------------------------

def regularized_current(path: FbmPath, phi: Callable[[np.ndarray], np.ndarray],
                        scheme: DerivScheme) -> float:
    """``int_0^T <phi(X_t), D X_t> dt`` by the trapezoidal rule.

    ``phi`` maps a ``(d, n)`` array of positions to a ``(d, n)`` array.
    """
    p = path.params
    D = discrete_derivative(path, scheme)
    F = np.asarray(phi(path.on_horizon()), dtype=float).reshape(D.shape)
    return float(np.sum(F * D, axis=0) @ trapezoid_weights(p.n_steps, p.dt))


# -- Wick decomposition ------------------------------------------------------

@lru_cache(maxsize=32)
def _atom_matrices(kind: str, H: float, eps: float, n_steps: int, dt: float):
    t = dt * np.arange(n_steps + 1)
    iu = np.triu_indices(n_steps + 1, k=1)
    at = cov_exact(kind, H, t[iu[0]], t[iu[1]], eps)
    c_diag = cov_exact(kind, H, t, t, eps).c
    return at.c, -(at.b * at.b_s), c_diag


def wick_decompose(path: FbmPath, alpha: float, scheme: DerivScheme) -> WickTerms:
    """Split ``Z = A + B1 - B2 + Q`` along one path.

    ``A`` carries ``d Cov(D X_t, D X_s)``; ``B1`` and ``B2`` carry
    ``beta = -Cov(D X_t, X_t - X_s) Cov(D X_s, X_t - X_s)`` against
    ``K_{alpha-1}`` and ``K_alpha``; ``Q`` is the remainder, with ``E Q = 0``.
    For ``alpha <= 1`` only ``A``, ``B2`` and ``Z`` are reported.
    """
    p = path.params
    pd = _pair_data(path, scheme)
    z = Z_double_integral(path, alpha, scheme, _pairs=pd)
    c, beta, c_diag = _atom_matrices(scheme.kind, p.H, scheme.eps, p.n_steps, p.dt)
    k_a = kernel_table(alpha, p.d)(pd.r)
    kd, _ = _diag_kernel(alpha, p.d, p.H, pd.ell)
    A = p.d * (2.0 * np.dot(pd.w_pair * c, k_a) + np.dot(pd.diag_w * c_diag, kd))
    # beta vanishes on the diagonal
    B2 = 2.0 * np.dot(pd.w_pair * beta, k_a)
    if alpha <= 1:
        return WickTerms(float(A), None, float(B2), None, z.value)
    B1 = 2.0 * np.dot(pd.w_pair * beta, kernel_table(alpha - 1, p.d)(pd.r))
    Q = z.value - A - B1 + B2
    return WickTerms(float(A), float(B1), float(B2), float(Q), z.value)


# -- deterministic expectation -----------------------------------------------

def _graded_nodes(a: float, b: float, levels: int = 30,
                  order: int = 12) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre panels on ``[a, b]`` refined geometrically toward both ends.

    The integrand has algebraic cusps ``|tau - c|^(2H)`` at 0, eps and 2 eps,
    which is where the pieces begin and end.
    """
    if b <= a:
        return np.empty(0), np.empty(0)
    g = 0.5 * 2.0 ** -np.arange(levels, -1, -1)
    brk = np.unique(np.concatenate([[0.0], g, 1.0 - g[::-1], [1.0]]))
    brk = a + (b - a) * brk
    x, w = np.polynomial.legendre.leggauss(order)
    lo, hi = brk[:-1, None], brk[1:, None]
    return (0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel(), (0.5 * (hi - lo) * w).ravel()


def _lag_rule(lo: float, hi: float, eps: float, extra: Sequence[float] = ()) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature in the lag on ``[lo, hi]``, split at eps, 2 eps and ``extra``."""
    cuts = sorted({lo, hi, *[c for c in (eps, 2 * eps, *extra) if lo < c < hi]})
    xs, ws = zip(*(_graded_nodes(a, b) for a, b in zip(cuts[:-1], cuts[1:])))
    return np.concatenate(xs), np.concatenate(ws)


def expected_pair_integral(kind: str, H: float, eps: float, T: float,
                           integrand: Callable[[CovarianceAtoms], np.ndarray]) -> tuple[float, float]:
    """``int int integrand(atoms(t, s)) dt ds`` over ``[0, T]^2``; returns ``(interior, strip)``.

    ``integrand`` must be symmetric in ``(t, s)``. Pairs away from the origin
    depend on the lag only and reduce to ``2 int (T' - tau) f(tau) dtau``.
    The symmetric scheme also has a strip ``min(t, s) < eps`` where its
    stencil is clamped at 0, integrated in ``(s, tau)`` coordinates with the
    pair passed relative to ``s``.
    """
    t0 = eps if kind == "symmetric" else 0.0
    Ti = T - t0
    tau, wt = _lag_rule(0.0, Ti, eps)
    f = integrand(cov_exact(kind, H, tau, np.zeros_like(tau), eps, floor=None))
    interior = 2.0 * float(np.dot(wt * (Ti - tau), f))
    strip = 0.0
    if kind == "symmetric":
        xs, ws = np.polynomial.legendre.leggauss(16)
        # four panels in s resolve the kink where t - eps crosses 0
        edges = np.linspace(0.0, eps, 5)
        for a, b in zip(edges[:-1], edges[1:]):
            for s, w in zip(0.5 * (b - a) * xs + 0.5 * (a + b), 0.5 * (b - a) * ws):
                x2, w2 = _lag_rule(0.0, T - s, eps, extra=(eps - s,))
                g = integrand(cov_exact(kind, H, x2, np.zeros_like(x2), eps, floor=-s))
                strip += 2.0 * w * float(np.dot(w2, g))
    return interior, strip


@dataclass(frozen=True)
class ExpectedZ:
    value: float
    interior: float
    strip: float
    finite: bool = True
    flags: tuple[str, ...] = ()


def expected_Z_exact(H: float, d: int, alpha: float, kind: str, eps: float,
                     T: float = 1.0) -> ExpectedZ:
    """Deterministic ``E Z_{alpha,eps}`` on ``[0, T]^2``.

    ``value`` includes the clamped strip of the symmetric scheme and
    ``interior`` excludes it. The result is infinite when ``alpha`` does not
    exceed the integrability threshold.
    """
    if alpha <= condition_B_threshold(H, d) or alpha <= 0:
        return ExpectedZ(float("inf"), float("inf"), float("nan"), False,
                         ("divergent: alpha below integrability threshold",))
    mt = moment_table(alpha, d)

    def integrand(at: CovarianceAtoms) -> np.ndarray:
        sig = at.tau**H
        return d * at.c * mt.mean(sig) + at.b * at.b_s * mt.laplacian_mean(sig)

    interior, strip = expected_pair_integral(kind, H, eps, T, integrand)
    return ExpectedZ(interior + strip, interior, strip)


# -- Monte Carlo -----------------------------------------------------------

def steps_for(eps: float, T: float, per_eps: int = 8) -> int:
    n = T / eps * per_eps
    if abs(n - round(n)) > 1e-9 * n:
        raise ValueError(f"T/eps={T / eps} must be rational with denominator dividing {per_eps}")
    return int(round(n))


def mc_expected_Z(H: float, d: int, alpha: float | Sequence[float], kind: str, eps: float,
                  T: float = 1.0, n_replicas: int = 1000, seed: int = 0,
                  threads: int | None = None, per_eps: int = 8) -> MCResult | list[MCResult]:
    """Sample mean of ``Z_{alpha,eps}`` over independent replicas.

    Replica ``i`` is seeded by ``(seed, i)``. Passing a sequence of orders
    evaluates them on the same paths and returns one result per order.
    """
    if n_replicas < 30:
        raise ValueError("need at least 30 replicas")
    alphas = [alpha] if np.ndim(alpha) == 0 else list(alpha)
    scheme = DerivScheme(kind, eps)
    params = FbmParams(H, d, T, steps_for(eps, T, per_eps), seed).padded_for(eps)

    def one(rng, i):
        path = sample_fbm(params, rng)
        return Z_over_alphas(path, alphas, scheme)

    z = np.array(run_replicas(one, n_replicas, seed, threads))
    out = [MCResult.from_samples(z[:, j], seed, H=H, d=d, alpha=a, kind=kind, eps=eps,
                                 n_steps=params.n_steps) for j, a in enumerate(alphas)]
    return out[0] if np.ndim(alpha) == 0 else out


# -- threshold sweep -------------------------------------------------------

@dataclass
class SweepRow:
    H: float
    d: int
    alpha: float
    eps: float
    scheme: str
    mode: str
    value: float
    stderr: float


@dataclass
class SweepTable:
    rows: list[SweepRow]
    slopes: dict[float, float]
    ratios: dict[float, float]
    classes: dict[float, str]
    trends: dict[float, str]
    alpha_H: float
    notes: list[str] = field(default_factory=list)


def classify(slope: float, dead_band: float = 0.05) -> str:
    """Sign of the slope outside a dead band."""
    if not np.isfinite(slope):
        return "diverging"
    return "diverging" if slope > dead_band else "bounded"


def trend(ratio: float, slope: float, max_ratio: float = 2.0, min_slope: float = 0.2) -> str:
    """``bounded`` if max/min over the eps grid stays below ``max_ratio``,
    ``diverging`` if the slope exceeds ``min_slope`` or the value is infinite."""
    if not np.isfinite(slope) or slope > min_slope:
        return "diverging"
    return "bounded" if ratio < max_ratio else "undecided"


def threshold_sweep(H: float, d: int, alphas: Sequence[float], epsilons: Sequence[float],
                    kind: str = "symmetric", mode: str = "exact", T: float = 1.0,
                    n_replicas: int = 200, seed: int = 0, threads: int | None = None,
                    dead_band: float = 0.05) -> SweepTable:
    """``E Z`` on an ``alpha x eps`` grid with a log-log slope against ``1/eps`` per order.

    The slope is fitted on the smaller half of the eps grid. ``classes`` calls
    an order ``diverging`` when the slope exceeds ``dead_band`` or ``E Z`` is
    infinite. ``trends`` applies the coarser rule of :func:`trend`, which
    tolerates the slow ``eps^(2H)`` approach to a finite limit for small ``H``.
    Both are trend checks and cannot prove divergence.
    """
    if kind == "forward" and H < 0.5:
        raise ValueError("the forward scheme needs H >= 1/2: the forward integral exists "
                         "in dimension one if and only if H >= 1/2")
    eps = sorted(float(e) for e in epsilons)[::-1]
    if len(eps) < 4:
        raise ValueError("need at least 4 eps values")
    rows: list[SweepRow] = []
    slopes, ratios, classes, trends = {}, {}, {}, {}
    notes: list[str] = []
    for a in alphas:
        vals = []
        for e in eps:
            if mode == "exact":
                r = expected_Z_exact(H, d, a, kind, e, T)
                v, se = r.value, 0.0
            elif mode == "mc":
                m = mc_expected_Z(H, d, a, kind, e, T, n_replicas, seed, threads)
                v, se = m.mean, m.stderr
            else:
                raise ValueError(f"unknown mode {mode!r}")
            vals.append(v)
            rows.append(SweepRow(H, d, float(a), e, kind, mode, float(v), float(se)))
        vals = np.array(vals)
        if not np.all(np.isfinite(vals)):
            slopes[a], ratios[a] = float("inf"), float("inf")
            notes.append(f"alpha={a}: E Z infinite for every eps")
        else:
            half = len(eps) // 2
            x = np.log(1.0 / np.array(eps[half:]))
            slopes[a] = float(np.polyfit(x, np.log(vals[half:]), 1)[0])
            ratios[a] = float(vals.max() / vals.min())
        classes[a] = classify(slopes[a], dead_band)
        trends[a] = trend(ratios[a], slopes[a])
        if classes[a] != trends[a]:
            notes.append(f"alpha={a}: slope {slopes[a]:.3f} and ratio {ratios[a]:.3f} disagree")
    return SweepTable(rows, slopes, ratios, classes, trends, alpha_H(H, d), notes)


# -- eta field ---------------------------------------------------------------

@dataclass(frozen=True)
class SpatialGrid:
    origin: np.ndarray
    spacing: float
    shape: tuple[int, ...]

    @property
    def axes(self) -> list[np.ndarray]:
        return [o + self.spacing * np.arange(n) for o, n in zip(self.origin, self.shape)]

    @property
    def cell_volume(self) -> float:
        return self.spacing ** len(self.shape)

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh])


def grid_for_path(path: FbmPath, spacing: float, margin: float) -> SpatialGrid:
    X = path.on_horizon()
    lo = X.min(axis=1) - margin
    hi = X.max(axis=1) + margin
    shape = tuple(int(np.ceil((h - l) / spacing)) + 1 for l, h in zip(lo, hi))
    return SpatialGrid(lo, float(spacing), shape)


@dataclass
class EtaField:
    grid: SpatialGrid
    values: np.ndarray  # (d, *shape)
    tail_bound: float
    min_distance: float
    flags: tuple[str, ...] = ()

    def norm2(self) -> float:
        """Grid quadrature of ``int |eta|^2``."""
        return float(np.sum(self.values**2) * self.grid.cell_volume)


def eta_field(path: FbmPath, alpha: float, scheme: DerivScheme, grid: SpatialGrid | None = None,
              spacing: float = 0.2, margin: float = 4.0, chunk: int = 8) -> EtaField:
    """``eta(x) = int_0^T K_{alpha/2}(x - X_t) D X_t dt`` on a grid.

    The time integral is trapezoidal. ``tail_bound`` bounds the mass of
    ``|eta|^2`` outside the box through the kernel's decay beyond the margin.
    """
    p = path.params
    if alpha <= condition_B_threshold(p.H, p.d):
        raise ValueError(f"alpha={alpha} is below the integrability threshold "
                         f"{condition_B_threshold(p.H, p.d)}")
    grid = grid_for_path(path, spacing, margin) if grid is None else grid
    X = path.on_horizon()
    margin_eff = float(np.min(np.concatenate([X.min(axis=1) - grid.origin,
                                              grid.origin + grid.spacing * (np.array(grid.shape) - 1)
                                              - X.max(axis=1)])))
    tab = kernel_table(alpha / 2, p.d)
    # every kernel decays at least like e^{-r}: unit decay length
    if margin_eff < 3.0:
        raise ValueError(f"box margin {margin_eff:.3g} is below three kernel decay lengths; "
                         "use a margin of at least 4")
    D = discrete_derivative(path, scheme)
    w = trapezoid_weights(p.n_steps, p.dt)
    pts = grid.points()
    eta = np.zeros((p.d, pts.shape[1]))
    dmin = np.inf
    for s in range(0, p.n_steps + 1, chunk):
        Xc = X[:, s:s + chunk]
        r = np.sqrt(((pts[:, :, None] - Xc[:, None, :]) ** 2).sum(axis=0))
        dmin = min(dmin, float(r.min()))
        kw = tab(r) * w[None, s:s + chunk]
        eta += D[:, s:s + chunk] @ kw.T
    flags = ("node-near-path",) if dmin < tab.r_min else ()
    total = float(np.sum(np.linalg.norm(D, axis=0) * w))
    tail = total**2 * _kernel_sq_tail(alpha / 2, p.d, margin_eff)
    return EtaField(grid, eta.reshape((p.d,) + grid.shape), tail, dmin, flags)


def _kernel_sq_tail(alpha: float, d: int, radius: float) -> float:
    """``int_{|y| > radius} K_alpha(y)^2 dy`` by radial quadrature."""
    tab = kernel_table(alpha, d)
    area = 2 * np.pi ** (d / 2) / special.gamma(d / 2)
    val, _ = integrate.quad(lambda r: area * r ** (d - 1) * float(tab(r)) ** 2, radius, radius + 80)
    return float(val)
