"""Monte Carlo checks of two Brownian estimates with unspecified constants.

Both checks report finiteness and stability under more sampling, never a value
for the constant. Moments of ``|x + W_t|`` also have an exact form, since
``|x + W_t|^2 / t`` is noncentral chi-square with ``d`` degrees of freedom.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .montecarlo import MCResult, hill_tail_index, run_replicas

BATCH = 250


def _brownian_batch(rng: np.random.Generator, n: int, d: int, T: float, n_steps: int) -> np.ndarray:
    """``(n, d, n_steps + 1)`` paths started at 0."""
    inc = rng.standard_normal((n, d, n_steps)) * np.sqrt(T / n_steps)
    W = np.zeros((n, d, n_steps + 1))
    np.cumsum(inc, axis=2, out=W[:, :, 1:])
    return W


def _trapezoid(y: np.ndarray, T: float) -> np.ndarray:
    n = y.shape[-1] - 1
    return (T / n) * (y[..., 1:-1].sum(axis=-1) + 0.5 * (y[..., 0] + y[..., -1]))


def _batches(n: int) -> list[int]:
    return [BATCH] * (n // BATCH) + ([n % BATCH] if n % BATCH else [])


def radial_moment(x_norm: float, t, d: int, p: float) -> np.ndarray:
    """``E |x + W_t|^p`` for ``|x| = x_norm``; infinite when ``p <= -d`` and ``t > 0``.

    With ``s = p/2`` and ``lam = |x|^2 / t`` this is
    ``(2t)^s Gamma(d/2 + s) / Gamma(d/2) 1F1(-s; d/2; -lam/2)`` (Kummer form).
    """
    t = np.asarray(t, dtype=float)
    s = 0.5 * p
    out = np.full(t.shape, float(x_norm) ** p if x_norm > 0 else (0.0 if p > 0 else np.inf))
    pos = t > 0
    if p <= -d:
        out[pos] = np.inf
        return out
    tp = t[pos]
    lam = x_norm**2 / tp
    pref = np.exp(special.gammaln(d / 2 + s) - special.gammaln(d / 2))
    out[pos] = (2 * tp) ** s * pref * special.hyp1f1(-s, d / 2, -lam / 2)
    return out


def tail_flags(name: str, samples: np.ndarray, min_index: float = 2.0) -> list[str]:
    idx = hill_tail_index(samples)
    return [f"{name}: heavy tail (Hill index {idx:.2f}); unreliable"] if idx < min_index else []


# -- squared Bessel moment inequality ------------------------------------------------

@dataclass(frozen=True)
class BesselMomentCase:
    d: int
    theta: float
    q: float
    x: tuple[float, ...]
    T: float = 1.0
    n_paths: int = 1000
    seed: int = 0
    n_steps: int = 1000

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ValueError("need d >= 2 so that points are polar")
        if self.q <= 1:
            raise ValueError("need q > 1")
        if len(self.x) != self.d:
            raise ValueError(f"x must have {self.d} components")

    @property
    def x_norm(self) -> float:
        return float(np.linalg.norm(self.x))


@dataclass
class BesselMomentReport:
    lhs: MCResult
    rhs_terms: tuple[MCResult, MCResult, MCResult]
    exact_terms: tuple[float, float, float]
    ratio: float
    flags: list[str] = field(default_factory=list)


def bessel_moment_estimates(case: BesselMomentCase, threads: int | None = None) -> BesselMomentReport:
    """Four expectations of the squared Bessel moment inequality.

    ``lhs = E (int_0^T |x+W_t|^(-2(1-theta)) dt)^(q/2)`` and the right-hand terms
    ``E|x+W_T|^(theta q)``, ``|x|^(theta q)`` and ``int_0^T E|x+W_t|^(-(2-theta) q) dt``.
    ``ratio`` is lhs over the sum of the exact right-hand terms.
    """
    c = case
    x = np.asarray(c.x, dtype=float)[None, :, None]
    a, b = -2 * (1 - c.theta), -(2 - c.theta) * c.q

    def batch(rng, i):
        R = np.linalg.norm(x + _brownian_batch(rng, _batches(c.n_paths)[i], c.d, c.T, c.n_steps), axis=1)
        occ = _trapezoid(R**a, c.T) if a != 0 else np.full(R.shape[0], float(c.T))
        return np.stack([occ ** (c.q / 2), R[:, -1] ** (c.theta * c.q), _trapezoid(R**b, c.T)])

    s = np.concatenate(run_replicas(batch, len(_batches(c.n_paths)), c.seed, threads), axis=1)
    meta = dict(d=c.d, theta=c.theta, q=c.q)
    lhs = MCResult.from_samples(s[0], c.seed, **meta)
    t1 = MCResult.from_samples(s[1], c.seed, **meta)
    t2 = MCResult.exact(c.x_norm ** (c.theta * c.q))
    t3 = MCResult.from_samples(s[2], c.seed, **meta)
    e1 = float(radial_moment(c.x_norm, c.T, c.d, c.theta * c.q))
    if b <= -c.d:
        e3 = float("inf")
    else:
        e3 = integrate.quad(lambda t: float(radial_moment(c.x_norm, t, c.d, b)), 0, c.T, limit=200)[0]
    flags: list[str] = []
    if b <= -c.d:
        flags.append(f"third term divergent: (2-theta)q = {-b:g} >= d = {c.d}")
    if c.theta * c.q <= -c.d:
        flags.append("first term divergent")
    for name, v in (("lhs", s[0]), ("term1", s[1]), ("term3", s[2])):
        flags += tail_flags(name, v)
    ratio = lhs.mean / (e1 + t2.mean + e3)
    return BesselMomentReport(lhs, (t1, t2, t3), (e1, t2.mean, e3), float(ratio), flags)


# -- maximal inequality ------------------------------------------------------------------

@dataclass(frozen=True)
class ExceedanceRow:
    radius: float
    frequency: float
    stderr: float
    bound: float

    @property
    def within(self) -> bool:
        """One-sided: the frequency does not exceed the bound by more than 3 stderr."""
        return self.frequency <= self.bound + 3 * self.stderr


def maximal_exceedance(radii=(2.0, 4.0, 8.0), d: int = 2, T: float = 1.0, n_paths: int = 10_000,
                       n_steps: int = 1000, seed: int = 0,
                       threads: int | None = None) -> list[ExceedanceRow]:
    """Frequency of ``max_[0,T] |W_t| >= |x|/2`` against ``2 exp(-|x| / 4T)``.

    The maximum is monitored on the grid, which can only lower the frequency.
    """
    def batch(rng, i):
        W = _brownian_batch(rng, _batches(n_paths)[i], d, T, n_steps)
        return np.linalg.norm(W, axis=1).max(axis=1)

    m = np.concatenate(run_replicas(batch, len(_batches(n_paths)), seed, threads))
    rows = []
    for r in radii:
        hit = (m >= 0.5 * r).astype(float)
        f = float(hit.mean())
        rows.append(ExceedanceRow(float(r), f, float(np.sqrt(max(f * (1 - f), 1e-300) / n_paths)),
                                  float(2 * np.exp(-r / (4 * T)))))
    return rows


# -- occupation integral -------------------------------------------------------------------

@dataclass
class OccupationResult:
    estimate: MCResult
    condition: bool
    envelope_rate: float
    flags: list[str] = field(default_factory=list)


def occupation_condition(d: int, alpha: float, p_prime: float) -> bool:
    """``(d - alpha + 1) p' < d``."""
    return (d - alpha + 1) * p_prime < d


def occupation_integral_estimate(d: int, alpha: float, p_prime: float, eps_decay: float = 1.0,
                                 n_paths: int = 10_000, seed: int = 0, T: float = 1.0,
                                 n_steps: int = 1000, threads: int | None = None) -> OccupationResult:
    """``int E[(int_0^T exp(-eps|x-W_t|) |x-W_t|^(2 alpha - 2d) dt)^(p'/2)] dx``.

    Each path is paired with one ``x`` drawn from the exponential envelope
    ``lam^d exp(-lam |x|) / (Gamma(d) |S^(d-1)|)``, with ``lam = eps p' / 2``, the
    decay of the integrand far from the path. The sample is the integrand
    divided by that density.
    """
    if d < 2 or alpha <= 1 or p_prime <= 1:
        raise ValueError("need d >= 2, alpha > 1 and p' > 1")
    lam = eps_decay * p_prime / 2
    log_area = np.log(2.0) + (d / 2) * np.log(np.pi) - special.gammaln(d / 2)
    gam = 2 * d - 2 * alpha

    def batch(rng, i):
        n = _batches(n_paths)[i]
        W = _brownian_batch(rng, n, d, T, n_steps)
        r = rng.gamma(d, 1 / lam, n)
        u = rng.standard_normal((n, d))
        x = u / np.linalg.norm(u, axis=1, keepdims=True) * r[:, None]
        R = np.linalg.norm(x[:, :, None] - W, axis=1)
        h = _trapezoid(np.exp(-eps_decay * R) * R ** (-gam), T) ** (p_prime / 2)
        log_f = d * np.log(lam) - lam * r - special.gammaln(d) - log_area
        return h * np.exp(-log_f)

    s = np.concatenate(run_replicas(batch, len(_batches(n_paths)), seed, threads))
    cond = occupation_condition(d, alpha, p_prime)
    flags = [] if cond else ["(d - alpha + 1) p' >= d: theory predicts possible divergence"]
    flags += tail_flags("occupation", s)
    est = MCResult.from_samples(s, seed, d=d, alpha=alpha, p_prime=p_prime, eps=eps_decay)
    return OccupationResult(est, cond, lam, flags)
