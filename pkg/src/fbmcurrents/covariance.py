"""Covariance algebra of fBm, its difference quotients and increments.

Every quantity here is a covariance between two zero-sum linear combinations of
path values, ``sum_i a_i X_{u_i}`` and ``sum_j b_j X_{v_j}``. Because the
weights sum to zero the marginal terms of ``R(u, v)`` cancel and

    Cov = -1/2 sum_ij a_i b_j |u_i - v_j|^(2H),

which is exact, also when a point is clamped to the origin (``X_0 = 0``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special


def alpha_H(H: float, d: int) -> float:
    """Sobolev threshold ``d/2 - 1 + 1/(2H)``."""
    _check_H(H)
    return d / 2.0 - 1.0 + 1.0 / (2.0 * H)


def condition_B_threshold(H: float, d: int) -> float:
    """Order above which ``E int int K_alpha(X_t - X_s) dt ds`` is finite."""
    _check_H(H)
    return max(0.0, d / 2.0 - 1.0 / (2.0 * H))


def _check_H(H: float) -> None:
    if not 0.0 < H < 1.0:
        raise ValueError(f"Hurst exponent must lie in (0, 1), got H={H}")


def moment_N(gamma: float, d: int) -> float:
    """``E|N|^gamma`` for a standard Gaussian vector in R^d."""
    if gamma <= -d:
        raise ValueError(f"E|N|^gamma is divergent for gamma={gamma} <= -d={-d}")
    return float(2.0 ** (gamma / 2) * np.exp(special.gammaln((d + gamma) / 2)
                                           - special.gammaln(d / 2)))


def _combo_cov(H: float, a_pts, a_w, b_pts, b_w) -> np.ndarray:
    # Zero-sum weights let every |u - v|^(2H) be replaced by |u - v|^(2H) - R^(2H)
    # for a common lag R. Written as R^(2H) expm1(2H log1p(.)), the first-order
    # parts then cancel exactly and second differences keep their precision.
    two_h = 2.0 * H
    lags = [np.abs(np.asarray(u) - np.asarray(v)) for u in a_pts for v in b_pts]
    ws = [wu * wv for wu in a_w for wv in b_w]
    R = np.maximum.reduce(lags)
    Rs = np.where(R > 0, R, 1.0)
    out = 0.0
    with np.errstate(divide="ignore"):
        for lag, w in zip(lags, ws):
            out = out + w * np.expm1(two_h * np.log1p((lag - R) / Rs))
    return -0.5 * np.where(R > 0, Rs**two_h * out, 0.0)


def _pow_m1(y, two_h: float) -> np.ndarray:
    """``|1 + y|^(2H) - 1`` without cancellation for small ``y``."""
    y = np.asarray(y, dtype=float)
    small = np.abs(y) < 0.5
    with np.errstate(divide="ignore"):
        log = np.where(small, np.log1p(np.where(small, y, 0.0)), np.log(np.abs(1.0 + y)))
    return np.expm1(two_h * log)


def derivative_stencil(kind: str, t, eps: float, floor=0.0):
    """Points and weights of the difference quotient at time ``t``.

    The point ``t - eps`` is clamped at ``floor`` (the origin of the path);
    ``floor=None`` disables clamping for interior pairs.
    """
    t = np.asarray(t, dtype=float)
    if kind == "symmetric":
        w = 0.5 / eps
        back = t - eps if floor is None else np.maximum(t - eps, floor)
        return (t + eps, back), (w, -w)
    if kind == "forward":
        return (t + eps, t), (1.0 / eps, -1.0 / eps)
    raise ValueError(f"unknown scheme {kind!r}")


@dataclass(frozen=True)
class CovarianceAtoms:
    """Per-component covariances at times ``(t, s)``.

    ``c = Cov(D X_t, D X_s)``, ``b = Cov(D X_t, X_t - X_s)`` and
    ``b_s = Cov(D X_s, X_t - X_s)``. ``boundary`` marks pairs where the
    symmetric stencil was clamped at the origin.
    """

    H: float
    eps: float
    kind: str
    tau: np.ndarray
    c: np.ndarray
    b: np.ndarray
    b_s: np.ndarray
    boundary: np.ndarray


def cov_exact(kind: str, H: float, t, s, eps: float, floor=0.0) -> CovarianceAtoms:
    """Atoms at times ``(t, s)`` with the path started at time ``floor``.

    Only time differences enter, so the pair can be passed relative to ``s``:
    ``cov_exact(kind, H, tau, 0, eps, floor=-s)`` resolves tiny lags without
    the rounding of ``(s + tau) - s``. ``floor=None`` is an interior pair.
    """
    _check_H(H)
    if np.any(np.asarray(eps) <= 0):
        raise ValueError("eps must be positive")
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if floor is not None and (np.any(t < floor) or np.any(s < floor)):
        raise ValueError("times must not precede the path origin")
    pt, wt = derivative_stencil(kind, t, eps, floor)
    ps, ws = derivative_stencil(kind, s, eps, floor)
    inc_p, inc_w = (t, s), (1.0, -1.0)
    c = _combo_cov(H, pt, wt, ps, ws)
    b = _combo_cov(H, pt, wt, inc_p, inc_w)
    b_s = _combo_cov(H, ps, ws, inc_p, inc_w)
    boundary = np.asarray(False)
    if kind == "symmetric" and floor is not None:
        boundary = (np.minimum(t, s) - floor) < eps
    return CovarianceAtoms(H, eps, kind, np.abs(t - s), np.asarray(c), np.asarray(b),
                           np.asarray(b_s), np.asarray(boundary))


def phi_psi_reference(H: float, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The displayed closed forms ``(Phi, psi, psi_tilde)`` at ``x != 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(x == 0):
        raise ValueError("x must be nonzero")
    two_h = 2.0 * H
    up, dn = _pow_m1(x, two_h), _pow_m1(-x, two_h)
    phi = (up + dn) / x**2
    psi = (up - dn) / (2 * x)
    psi_t = (np.abs(x) ** two_h - dn) / (2 * x)
    return phi, psi, psi_t


def reference_atoms(kind: str, H: float, tau, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """``(c, b)`` from the displayed closed forms, interior points, ``tau > 0``."""
    tau = np.asarray(tau, dtype=float)
    if kind == "symmetric":
        phi, _, _ = phi_psi_reference(H, 2 * eps / tau)
        _, psi, _ = phi_psi_reference(H, eps / tau)
        return 0.5 * tau ** (2 * H - 2) * phi, tau ** (2 * H - 1) * psi
    phi, _, psi_t = phi_psi_reference(H, eps / tau)
    return 0.5 * tau ** (2 * H - 2) * phi, tau ** (2 * H - 1) * psi_t


def richardson_limit(f, k0: int = 6, levels: int = 8, powers=None) -> float:
    """Limit of ``f(x)`` as ``x -> 0+`` from samples at ``x = 2^-k``.

    ``powers`` lists the exponents of the error expansion, eliminated in order
    (default ``1, 2, 3, ...``).
    """
    if powers is None:
        powers = range(1, levels)
    col = [float(f(2.0 ** -(k0 + j))) for j in range(levels)]
    for p in list(powers)[: levels - 1]:
        g = 2.0**p
        col = [(g * col[j + 1] - col[j]) / (g - 1) for j in range(len(col) - 1)]
    return col[0]


def phi_limit(H: float) -> dict[str, float]:
    """Measured ``Phi(0+)`` against ``2H(2H-1)`` and the value ``2H-1``."""
    measured = richardson_limit(lambda x: phi_psi_reference(H, x)[0], k0=4, levels=6)
    return {"measured": measured, "taylor": 2 * H * (2 * H - 1), "stated": 2 * H - 1}


def b_limit(kind: str, H: float, tau: float = 1.0) -> dict[str, float]:
    """``lim_{eps->0} |Cov(D X_t, X_t - X_s)|`` at lag ``tau`` for the interior pair.

    Both ``D X_t`` and ``D X_s`` are reported since the forward scheme is not
    antisymmetric.
    """
    t0 = 2.0 * tau
    stated = 2 * H * tau ** (2 * H - 1)
    if kind == "forward" and H < 0.5:
        # the eps^(2H-1) / 2 term of the forward quotient blows up
        return {"b_t": float("inf"), "b_s": float("inf"), "stated": stated}
    if kind == "symmetric":
        powers = [2, 4, 6, 8]
    elif H > 0.5:
        powers = [2 * H - 1, 1, 2 * H, 2, 3]
    else:
        powers = [1, 2, 3, 4]
    lim = lambda attr: richardson_limit(
        lambda e: getattr(cov_exact(kind, H, t0, t0 - tau, e * tau), attr),
        k0=5, levels=len(powers) + 1, powers=powers)
    bt, bs = lim("b"), lim("b_s")
    return {"b_t": abs(bt), "b_s": abs(bs), "stated": stated}


def bound_constants(kind: str, H: float, taus, epss) -> tuple[float, float]:
    """Smallest ``C`` with ``|c| <= C tau^(2H-2)`` and ``|b| <= C tau^(2H-1)`` on a lattice."""
    tau, eps = np.meshgrid(np.asarray(taus, float), np.asarray(epss, float), indexing="ij")
    t0 = tau + eps + 1.0
    at = cov_exact(kind, H, t0, t0 - tau, eps)
    cc = np.max(np.abs(at.c) / tau ** (2 * H - 2))
    cb = np.max(np.maximum(np.abs(at.b), np.abs(at.b_s)) / tau ** (2 * H - 1))
    return float(cc), float(cb)


def cov_table(kind: str, H: float, taus, epss) -> list[dict[str, float]]:
    """Rows ``(tau, eps, c_exact, c_reference, b_exact, b_reference)`` at interior points.

    ``b_exact`` is ``Cov(D X_t, X_t - X_s)`` for the symmetric scheme and
    ``Cov(D X_s, X_t - X_s)`` for the forward one, the side the displayed
    forms describe up to a constant.
    """
    rows = []
    for tau in taus:
        for eps in epss:
            t0 = 2 * eps + tau + 1.0
            at = cov_exact(kind, H, t0, t0 - tau, eps)
            c_ref, b_ref = reference_atoms(kind, H, tau, eps)
            b = at.b if kind == "symmetric" else at.b_s
            rows.append({"tau": float(tau), "eps": float(eps), "c_exact": float(at.c),
                         "c_reference": float(c_ref), "b_exact": float(b),
                         "b_reference": float(b_ref)})
    return rows
