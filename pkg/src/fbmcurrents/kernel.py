"""Bessel-potential kernel K_alpha of (1 - Laplacian)^(-alpha) on R^d.

    K_alpha(x) = gamma * int_0^inf t^(alpha - d/2) exp(-|x|^2/(4t) - t) dt/t,
    gamma      = 1 / (Gamma(alpha) (4 pi)^(d/2)).

Three evaluation routes live here:

* :func:`eval_K` -- adaptive Gauss-Kronrod quadrature, the reference evaluator;
* :func:`kernel_values` -- trapezoidal rule in ``u = log t``; the integrand is
  analytic and decays double exponentially, so the rule converges
  geometrically and vectorises over radii;
* :class:`KernelTable` -- monotone cubic interpolation of ``log|K| + r``
  against ``log r`` on a dense log grid, the hot path for double integrals.

Orders ``alpha <= 0`` are admitted through ``1/Gamma(alpha)`` (zero at
``alpha = 0``, where the operator is the identity and the kernel vanishes off
the origin).
"""

from __future__ import annotations

import threading
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import integrate, interpolate, special

Regime = Literal["subcritical", "critical", "supercritical"]

_REGIME_TOL = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    alpha: float
    d: int

    def __post_init__(self) -> None:
        if int(self.d) < 1:
            raise ValueError("dimension must be >= 1")

    @property
    def nu(self) -> float:
        return self.alpha - self.d / 2.0

    @property
    def gamma_const(self) -> float:
        return float(special.rgamma(self.alpha) / (4.0 * np.pi) ** (self.d / 2.0))

    @property
    def regime(self) -> Regime:
        if abs(self.nu) <= _REGIME_TOL:
            return "critical"
        return "subcritical" if self.nu < 0 else "supercritical"

    def lowered(self, k: int = 1) -> "KernelSpec":
        return KernelSpec(self.alpha - k, self.d)


def _spec(spec_or_alpha, d: int | None = None) -> KernelSpec:
    if isinstance(spec_or_alpha, KernelSpec):
        return spec_or_alpha
    return KernelSpec(float(spec_or_alpha), int(d))


def _log_integrand(nu: float, r: float):
    a = 0.25 * r * r
    return lambda u: nu * u - a * np.exp(np.minimum(-u, 700.0)) - np.exp(np.minimum(u, 700.0))


def _peak(nu: float, r: float) -> float:
    # maximiser of nu*u - r^2/4 e^-u - e^u
    return float(np.log(0.5 * (nu + np.hypot(nu, r))))


def eval_K(spec: KernelSpec, r: float, rtol: float = 1e-10) -> float:
    """Kernel value at radius ``r`` by adaptive quadrature in ``log t``.

    The range is split at ``t = max(1, r)`` and at the maximiser of the
    integrand; the integrand is scaled by its peak value so large radii do not
    underflow.
    """
    r = float(r)
    if r < 0:
        raise ValueError("radius must be >= 0")
    if r == 0.0:
        return eval_K_zero(spec)
    g = spec.gamma_const
    if g == 0.0:
        return 0.0
    nu = spec.nu
    phi = _log_integrand(nu, r)
    u_peak = _peak(nu, r)
    shift = phi(u_peak)
    f = lambda u: np.exp(phi(u) - shift)
    cuts = sorted({u_peak, float(np.log(max(1.0, r)))})
    pieces = [(-np.inf, cuts[0])] + list(zip(cuts[:-1], cuts[1:])) + [(cuts[-1], np.inf)]
    total = 0.0
    for lo, hi in pieces:
        if hi <= lo:
            continue
        val, _ = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=rtol * 0.1, limit=400)
        total += val
    return float(g * total * np.exp(shift))


def eval_K_zero(spec: KernelSpec) -> float:
    """``K_alpha(0) = gamma * Gamma(alpha - d/2)``, finite only when ``alpha > d/2``."""
    if spec.nu <= _REGIME_TOL:
        raise ValueError(
            f"K_alpha(0) is divergent for alpha={spec.alpha} <= d/2={spec.d / 2}: "
            "the kernel is singular at the origin")
    return float(special.gamma(spec.nu) * spec.gamma_const)


def laplacian_K(spec: KernelSpec, r: float, rtol: float = 1e-10) -> float:
    """``-Laplacian K_alpha(r) = K_{alpha-1}(r) - K_alpha(r)`` for ``r > 0``.

    Follows from ``(1 - Laplacian) K_alpha = K_{alpha-1}`` away from the origin.
    """
    if not r > 0:
        raise ValueError("the Laplacian identity holds for r > 0 only")
    return eval_K(spec.lowered(), r, rtol) - eval_K(spec, r, rtol)


def radial_laplacian_fd(fn, r: float, d: int, h: float = 1e-3) -> float:
    """Five-point finite-difference ``f'' + (d-1)/r f'`` of a radial profile."""
    f = np.array([fn(r + k * h) for k in (-2, -1, 0, 1, 2)])
    d1 = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
    d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
    return float(d2 + (d - 1) / r * d1)


# -- vectorised evaluation -------------------------------------------------

def _u_grid(nu: float, r_min: float, r_max: float, h: float) -> np.ndarray:
    lo = 2.0 * np.log(r_min / 2.0) - 6.0
    if nu > 0:
        lo = max(lo, -40.0 / nu + min(0.0, np.log(nu)))
    hi = max(np.log(max(r_max, 1.0)), np.log(abs(nu) + 1.0)) + 4.5
    return np.arange(lo, hi + h, h)


def kernel_values(spec: KernelSpec, r, h: float | None = None, chunk: int = 512) -> np.ndarray:
    """``K_alpha`` at an array of positive radii (trapezoidal rule in ``log t``).

    The peak of the integrand narrows like ``r^(-1/2)`` in ``u``, so the default
    step shrinks accordingly.
    """
    r = np.asarray(r, dtype=float)
    flat = r.ravel()
    if np.any(flat <= 0):
        raise ValueError("kernel_values needs r > 0; use eval_K_zero at the origin")
    g = spec.gamma_const
    out = np.zeros_like(flat)
    if g == 0.0 or flat.size == 0:
        return out.reshape(r.shape)
    nu = spec.nu
    if h is None:
        h = min(0.1, 0.6 / np.sqrt(float(flat.max()) + abs(nu)))
    u = _u_grid(nu, float(flat.min()), float(flat.max()), h)
    eu, emu = np.exp(u), np.exp(-u)
    for s in range(0, flat.size, chunk):
        rr = flat[s : s + chunk, None]
        expo = nu * u[None, :] - 0.25 * rr * rr * emu[None, :] - eu[None, :]
        peak = expo.max(axis=1, keepdims=True)
        out[s : s + chunk] = h * np.exp(expo - peak).sum(axis=1) * np.exp(peak[:, 0])
    return (g * out).reshape(r.shape)


# -- memo table ------------------------------------------------------------

class KernelTable:
    """Interpolated ``K_alpha`` for repeated evaluation at many radii.

    ``log|K|`` is interpolated against ``log r`` with PCHIP on
    ``points_per_decade`` nodes per decade of ``[r_min, r_max]``. Below
    ``r_min`` the first interval is extended linearly in log-log (power law);
    above ``r_max`` the profile is continued as ``r^p e^-r``. Immutable after construction.
    """

    def __init__(self, spec: KernelSpec, r_min: float = 1e-8, r_max: float = 200.0,
                 points_per_decade: int = 400):
        self.spec = spec
        self._cell_tables: dict[float, object] = {}
        self._lock = threading.Lock()
        self.r_min, self.r_max = float(r_min), float(r_max)
        n = int(points_per_decade * np.log10(r_max / r_min)) + 1
        self.log_r = np.linspace(np.log(r_min), np.log(r_max), n)
        vals = kernel_values(spec, np.exp(self.log_r))
        self.sign = 1.0 if spec.gamma_const >= 0 else -1.0
        self.zero = spec.gamma_const == 0.0
        if self.zero:
            self._pchip = None
            return
        # the exponential factor e^-r is removed before interpolating
        self.log_k = np.log(np.abs(vals))
        r_nodes = np.exp(self.log_r)
        self._pchip = interpolate.PchipInterpolator(self.log_r, self.log_k + r_nodes,
                                                    extrapolate=False)
        lr, lk = self.log_r, self.log_k
        self._slope_lo = (lk[1] - lk[0]) / (lr[1] - lr[0])
        r1, r2 = r_nodes[-2:]
        self._slope_hi = (lk[-1] + r2 - lk[-2] - r1) / (lr[-1] - lr[-2])
        # the nodes are uniform, so cells are located by arithmetic, not search
        self._coef = np.ascontiguousarray(self._pchip.c.T)
        self._step = lr[1] - lr[0]

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.zero:
            return np.zeros_like(r)
        if r.ndim == 0:
            return self(r[None])[0]
        lr = np.log(np.maximum(r, 1e-300))
        pos = (lr - self.log_r[0]) / self._step
        idx = np.clip(pos.astype(np.intp), 0, len(self._coef) - 1)
        x = (pos - idx) * self._step
        c = self._coef[idx]
        out = ((c[..., 0] * x + c[..., 1]) * x + c[..., 2]) * x + c[..., 3] - r
        lo = r < self.r_min
        if lo.any():
            out[lo] = self.log_k[0] + self._slope_lo * (lr[lo] - self.log_r[0])
        hi = r > self.r_max
        if hi.any():
            out[hi] = (self.log_k[-1] + self.r_max - r[hi]
                       + self._slope_hi * (lr[hi] - self.log_r[-1]))
        return self.sign * np.exp(out)

    @property
    def origin_exponent(self) -> float:
        """Local log-log slope at ``r_min``: ``2 alpha - d`` when subcritical."""
        return float(self._slope_lo)

    def cell_average(self, ell, H: float) -> np.ndarray:
        """``2 int_0^1 (1 - v) K(ell v^H) dv`` for an array of scales ``ell``.

        This is the mean of ``K(X_t - X_s)`` over a diagonal cell when the
        path displacement over a lag ``u`` of the cell of length ``h`` is
        modelled as ``ell (u / h)^H``; finite iff ``H (2 alpha - d) > -1``.
        """
        fn = self._cell_tables.get(H)
        if fn is None:
            with self._lock:
                fn = self._cell_tables.get(H)
                if fn is None:
                    fn = self._cell_tables[H] = self._build_cell_table(H)
        ell = np.asarray(ell, dtype=float)
        return fn(np.log(np.maximum(ell, 1e-300)))

    def _build_cell_table(self, H: float):
        if self.zero:
            return lambda x: np.zeros_like(x)
        p = self.origin_exponent if self.spec.nu < 0 else 0.0
        rate = 1.0 / H + p
        if rate <= 0:
            raise ValueError(
                f"diagonal cell integral diverges: H*(2 alpha - d) <= -1 "
                f"(alpha={self.spec.alpha}, d={self.spec.d}, H={H})")
        log_ell = np.linspace(np.log(1e-12), np.log(50.0), 2400)
        s_min = max(-40.0 / rate, -60.0)
        # Gauss-Legendre panels of unit width in s = H log v
        edges = np.linspace(s_min, 0.0, int(np.ceil(-s_min)) + 1)
        gx, gw = np.polynomial.legendre.leggauss(16)
        a, b = edges[:-1, None], edges[1:, None]
        s = (0.5 * (b - a) * gx + 0.5 * (a + b)).ravel()
        w = (0.5 * (b - a) * gw).ravel()
        y = np.exp(s / H)
        weight = (2.0 / H) * (1.0 - y) * y * w
        G = np.empty_like(log_ell)
        for i, le in enumerate(log_ell):
            G[i] = np.dot(weight, self(np.exp(le + s)))
            # analytic tail below s_min with K ~ K(ell e^s_min) e^{p (s - s_min)}
            G[i] += (2.0 / H) * self(np.exp(le + s_min)) * np.exp(s_min / H) / rate
        spline = interpolate.PchipInterpolator(log_ell, G, extrapolate=True)
        return spline


_TABLES: dict[tuple, KernelTable] = {}
_TABLES_LOCK = threading.Lock()


def kernel_table(alpha: float, d: int, **kw) -> KernelTable:
    """Shared, lazily built :class:`KernelTable` for ``(alpha, d)``."""
    key = (float(alpha), int(d), tuple(sorted(kw.items())))
    tab = _TABLES.get(key)
    if tab is None:
        with _TABLES_LOCK:
            tab = _TABLES.get(key)
            if tab is None:
                tab = KernelTable(KernelSpec(float(alpha), int(d)), **kw)
                _TABLES[key] = tab
    return tab


# -- Gaussian expectations -------------------------------------------------

def _heat_moment(alpha: float, d: int, a, k: float, h: float = 0.05) -> np.ndarray:
    """``int_0^inf t^(alpha-1) e^-t (t + a)^-k dt`` for an array of ``a > 0``."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    lo = min(np.log(a.min()), 0.0) - 40.0 / min(alpha, 1.0)
    if alpha < k:
        lo = min(lo, np.log(a.min()) - 40.0 / alpha)
    hi = np.log(max(alpha, 1.0)) + 5.0
    u = np.arange(lo, hi + h, h)
    eu = np.exp(u)
    expo = alpha * u[None, :] - eu[None, :] - k * np.log(eu[None, :] + a[:, None])
    return h * np.exp(expo).sum(axis=1)


def gaussian_expectation_K(spec: KernelSpec, sigma, method: str = "radial") -> np.ndarray | float:
    """``m(sigma) = E[K_alpha(sigma N)]`` with ``N`` a standard Gaussian in R^d.

    ``method="radial"`` integrates ``K_alpha(sigma r)`` against the chi
    density of ``|N|``; ``method="heat"`` uses the identity
    ``E exp(-|sigma N|^2 / 4t) = (1 + sigma^2/2t)^(-d/2)`` inside the kernel's
    integral representation, which leaves the one-dimensional integral
    ``(4 pi)^(-d/2) / Gamma(alpha) int t^(alpha-1) e^-t (t + sigma^2/2)^(-d/2) dt``.
    """
    if spec.alpha <= 0:
        raise ValueError(f"E[K_alpha(sigma N)] diverges for alpha={spec.alpha} <= 0")
    scalar = np.ndim(sigma) == 0
    sig = np.atleast_1d(np.asarray(sigma, dtype=float))
    if np.any(sig < 0):
        raise ValueError("sigma must be >= 0")
    out = np.empty_like(sig)
    zero = sig == 0
    if np.any(zero):
        out[zero] = eval_K_zero(spec)
    pos = ~zero
    if np.any(pos):
        if method == "heat":
            out[pos] = (special.rgamma(spec.alpha) / (4 * np.pi) ** (spec.d / 2)
                        * _heat_moment(spec.alpha, spec.d, 0.5 * sig[pos] ** 2, spec.d / 2))
        elif method == "radial":
            out[pos] = [_radial_expectation(spec, s) for s in sig[pos]]
        else:
            raise ValueError(f"unknown method {method!r}")
    return float(out[0]) if scalar else out


def _radial_expectation(spec: KernelSpec, sigma: float) -> float:
    d = spec.d
    log_norm = (1 - d / 2) * np.log(2) - special.gammaln(d / 2)
    tab = kernel_table(spec.alpha, d)
    # integrate in log r: r^d exp(-r^2/2) K(sigma r) dlog r
    f = lambda lr: np.exp(d * lr - 0.5 * np.exp(2 * lr) + log_norm) * tab(sigma * np.exp(lr))
    lo = np.log(1e-9 / max(sigma, 1e-9)) if spec.nu < 0 else -40.0
    val, _ = integrate.quad(f, lo, np.log(40.0), epsabs=0.0, epsrel=1e-11, limit=400,
                            points=[0.0, -np.log(max(sigma, 1e-12))])
    return float(val)


def gaussian_expectation_laplacian_K(spec: KernelSpec, sigma) -> np.ndarray | float:
    """``E[Laplacian K_alpha(sigma N)]`` for ``sigma > 0``.

    Gaussian integration by parts gives
    ``-(d/2) (4 pi)^(-d/2) / Gamma(alpha) int t^(alpha-1) e^-t (t + sigma^2/2)^(-d/2-1) dt``;
    for ``alpha > 1`` this equals ``m_alpha - m_{alpha-1}``.
    """
    if spec.alpha <= 0:
        raise ValueError("alpha must be positive")
    scalar = np.ndim(sigma) == 0
    sig = np.atleast_1d(np.asarray(sigma, dtype=float))
    if np.any(sig <= 0):
        raise ValueError("sigma must be > 0")
    out = (-0.5 * spec.d * special.rgamma(spec.alpha) / (4 * np.pi) ** (spec.d / 2)
           * _heat_moment(spec.alpha, spec.d, 0.5 * sig**2, spec.d / 2 + 1))
    return float(out[0]) if scalar else out


class MomentTable:
    """``sigma -> (E K_alpha(sigma N), E Laplacian K_alpha(sigma N))`` by interpolation.

    Both are smooth in ``log sigma`` and are tabulated by the heat-kernel
    integrals on ``[1e-10, 1e4]`` (power laws beyond). The first is
    infinite (``inf``) when ``alpha <= 0``.
    """

    def __init__(self, spec: KernelSpec, per_decade: int = 100):
        self.spec = spec
        ls = np.linspace(np.log(1e-10), np.log(1e4), int(14 * per_decade) + 1)
        self._ls = ls
        sig = np.exp(ls)
        pre = special.rgamma(spec.alpha) / (4 * np.pi) ** (spec.d / 2)
        self._fits = []
        for k, sign in ((spec.d / 2, 1.0), (spec.d / 2 + 1, -0.5 * spec.d)):
            vals = []
            for chunk in np.array_split(0.5 * sig**2, 8):
                vals.append(_heat_moment(spec.alpha, spec.d, chunk, k))
            lv = np.log(np.concatenate(vals))
            self._fits.append((sign * pre, interpolate.CubicSpline(ls, lv), lv))

    def _eval(self, which: int, sigma) -> np.ndarray:
        pre, spl, lv = self._fits[which]
        ls = np.log(np.asarray(sigma, dtype=float))
        out = spl(np.clip(ls, self._ls[0], self._ls[-1]))
        for edge, j in ((ls < self._ls[0], 0), (ls > self._ls[-1], -1)):
            if np.any(edge):
                jj = (0, 1) if j == 0 else (-2, -1)
                slope = (lv[jj[1]] - lv[jj[0]]) / (self._ls[jj[1]] - self._ls[jj[0]])
                out = np.where(edge, lv[j] + slope * (ls - self._ls[j]), out)
        return pre * np.exp(out)

    def mean(self, sigma) -> np.ndarray:
        return self._eval(0, sigma)

    def laplacian_mean(self, sigma) -> np.ndarray:
        return self._eval(1, sigma)


_MOMENTS: dict[tuple, MomentTable] = {}


def moment_table(alpha: float, d: int) -> MomentTable:
    key = (float(alpha), int(d))
    tab = _MOMENTS.get(key)
    if tab is None:
        with _TABLES_LOCK:
            tab = _MOMENTS.get(key)
            if tab is None:
                tab = _MOMENTS[key] = MomentTable(KernelSpec(float(alpha), int(d)))
    return tab


def normalization_integral(spec: KernelSpec) -> tuple[float, float]:
    """``int_{R^d} K_alpha`` by radial quadrature, with an exponential tail bound."""
    d = spec.d
    area = 2 * np.pi ** (d / 2) / special.gamma(d / 2)
    tab = kernel_table(spec.alpha, d)
    r_cut = 60.0
    f = lambda lr: area * np.exp(d * lr) * tab(np.exp(lr))
    val, _ = integrate.quad(f, np.log(1e-12), np.log(r_cut), epsabs=0, epsrel=1e-10, limit=400)
    # K decays at least like e^{-r} r^{alpha-(d+1)/2}; bound the remainder by the last slab
    k_cut = float(tab(r_cut))
    tail = area * k_cut * r_cut ** (d - 1) * 2.0
    return float(val), tail


# -- semigroup identity ----------------------------------------------------

def _graded_axis(points: list[float], lo: float, hi: float, levels: int, order: int,
                 base: float) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on [lo, hi], geometrically graded to ``points``."""
    brk = {lo, hi}
    for p in points:
        brk.add(p)
        for j in range(levels + 1):
            off = base * 2.0 ** (-j)
            for q in (p - off, p + off):
                if lo < q < hi:
                    brk.add(q)
    brk = np.array(sorted(brk))
    gx, gw = np.polynomial.legendre.leggauss(order)
    a, b = brk[:-1, None], brk[1:, None]
    x = 0.5 * (b - a) * gx[None, :] + 0.5 * (a + b)
    w = 0.5 * (b - a) * gw[None, :]
    return x.ravel(), w.ravel()


@dataclass(frozen=True)
class SemigroupCheck:
    lhs: float
    rhs: float
    residual: float
    tail_bound: float
    box: float


def check_semigroup(alpha: float, d: int, r: float, box: float = 20.0,
                    levels: int | None = None, order: int = 12) -> SemigroupCheck:
    """Compare ``int K_{alpha/2}(x - y) K_{alpha/2}(x - z) dx`` with ``K_alpha(|y - z|)``.

    ``y = 0`` and ``z = r e_1``; the integral runs over the box
    ``[-box, box + r] x [-box, box]^(d-1)`` with a tensor rule graded toward
    the two singular points. A warning is issued when the estimated mass
    outside the box exceeds the residual tolerance 1e-3.
    """
    half = KernelSpec(alpha / 2, d)
    full = KernelSpec(alpha, d)
    tab = kernel_table(alpha / 2, d)
    if levels is None:
        levels = 40 if d == 1 else 10
    xs, wx = _graded_axis([0.0, r], -box, box + r, levels, order, 1.0)
    others = [_graded_axis([0.0], -box, box, levels, order, 1.0)] * (d - 1)
    if d == 1:
        d0 = np.abs(xs)
        d1 = np.abs(xs - r)
        lhs = float(np.sum(wx * tab(d0) * tab(d1)))
    else:
        grids = np.meshgrid(*([xs] + [o[0] for o in others]), indexing="ij", sparse=True)
        wgrid = np.multiply.reduce(np.meshgrid(*([wx] + [o[1] for o in others]),
                                               indexing="ij", sparse=True))
        sq_perp = sum(g**2 for g in grids[1:])
        lhs = float(np.sum(wgrid * tab(np.sqrt(grids[0] ** 2 + sq_perp))
                           * tab(np.sqrt((grids[0] - r) ** 2 + sq_perp))))
    rhs = eval_K_zero(full) if r == 0 else eval_K(full, r)
    # outside the box both factors decay at least like their values at the box edge
    edge = float(tab(box))
    tail = edge * edge * (2 * box) ** (d - 1) * 2 * d
    if tail > 1e-3 * abs(rhs):
        warnings.warn(f"box {box} is small for alpha={alpha}, d={d}: tail bound {tail:.3g}",
                      RuntimeWarning, stacklevel=2)
    return SemigroupCheck(lhs, rhs, abs(lhs - rhs) / abs(rhs), tail, box)


# -- envelopes -------------------------------------------------------------

@dataclass(frozen=True)
class Envelope:
    """Calibrated two-sided bound for ``K_alpha`` in one regime.

    subcritical:   c r^(2a-d) e^(-2 r^2) <= K <= C r^(2a-d) e^(-r/8)
    supercritical: c e^(-r^2/4)           <= K <= C e^(-r/8)
    critical:      c L(r) e^(-r^2/4)      <= K <= C L(r) e^(-r/8),  L = 1 + |log r|
    """

    spec: KernelSpec
    lower_const: float
    upper_const: float

    def profile(self, r) -> tuple[np.ndarray, np.ndarray]:
        r = np.asarray(r, dtype=float)
        reg = self.spec.regime
        if reg == "subcritical":
            pw = r ** (2 * self.spec.nu)
            return pw * np.exp(-2 * r**2), pw * np.exp(-r / 8)
        if reg == "critical":
            L = 1.0 + np.abs(np.log(r))
            return L * np.exp(-(r**2) / 4), L * np.exp(-r / 8)
        return np.exp(-(r**2) / 4), np.exp(-r / 8)

    def __call__(self, r) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.profile(r)
        return self.lower_const * lo, self.upper_const * hi


_ENVELOPES: dict[tuple, Envelope] = {}


def calibrate_envelope(spec: KernelSpec, r_grid=None) -> Envelope:
    key = (spec.alpha, spec.d)
    env = _ENVELOPES.get(key)
    if env is not None and r_grid is None:
        return env
    if r_grid is None:
        r_grid = np.geomspace(1e-6, 60.0, 2000)
    k = kernel_values(spec, r_grid)
    shell = Envelope(spec, 1.0, 1.0)
    lo, hi = shell.profile(r_grid)
    with np.errstate(divide="ignore", over="ignore"):
        lower = float(np.exp(np.min(np.log(k) - np.log(lo))))
        upper = float(np.exp(np.max(np.log(k) - np.log(hi))))
    env = Envelope(spec, lower, upper)
    _ENVELOPES[key] = env
    return env


def asymptotic_envelope(spec: KernelSpec, r) -> tuple[np.ndarray | float, np.ndarray | float]:
    """Regime-appropriate ``(lower, upper)`` bounds at ``r > 0`` with calibrated constants."""
    env = calibrate_envelope(spec)
    lo, hi = env(r)
    if np.ndim(r) == 0:
        return float(lo), float(hi)
    return lo, hi


def loglog_slope(spec: KernelSpec, r_lo: float, r_hi: float, n: int = 41) -> float:
    """Least-squares slope of ``log K`` against ``log r`` on a log grid."""
    r = np.geomspace(r_lo, r_hi, n)
    return float(np.polyfit(np.log(r), np.log(kernel_values(spec, r)), 1)[0])
