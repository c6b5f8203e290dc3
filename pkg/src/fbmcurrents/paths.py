"""Exact synthesis of d-dimensional fractional Brownian motion on a uniform grid.

Each component is an independent fBm with covariance
``R(s, t) = (s^{2H} + t^{2H} - |t - s|^{2H}) / 2``. The increments form a
stationary Gaussian sequence (fractional Gaussian noise), which is sampled
exactly by circulant embedding; dense Cholesky factorisation of the grid
covariance is the fallback whenever the embedding has a negative eigenvalue.
"""

from __future__ import annotations

import csv
import logging
import struct
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Literal, Sequence

import numpy as np

from .montecarlo import MCResult, replica_rng, run_replicas

log = logging.getLogger(__name__)

SchemeKind = Literal["forward", "symmetric"]

_HEADER = struct.Struct("<2sHIddQ")  # magic, d, n_steps, H, T, seed: 32 bytes
_MAGIC = b"FB"


@dataclass(frozen=True)
class FbmParams:
    """Grid and law of a sampled path.

    ``pad_steps`` extra grid steps are synthesised past ``T`` so that
    difference quotients reaching ``t + eps`` need no extrapolation.
    """

    H: float
    d: int = 1
    T: float = 1.0
    n_steps: int = 256
    seed: int = 0
    pad_steps: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.H < 1.0:
            raise ValueError(f"Hurst exponent must lie in (0, 1), got H={self.H}")
        if int(self.d) < 1:
            raise ValueError(f"dimension must be >= 1, got d={self.d}")
        if not self.T > 0:
            raise ValueError(f"horizon must be positive, got T={self.T}")
        if int(self.n_steps) < 2:
            raise ValueError(f"n_steps must be >= 2, got {self.n_steps}")
        if int(self.pad_steps) < 0:
            raise ValueError("pad_steps must be >= 0")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

    @property
    def dt(self) -> float:
        return self.T / self.n_steps

    @property
    def n_total(self) -> int:
        """Number of synthesised increments, padding included."""
        return self.n_steps + self.pad_steps

    def padded_for(self, eps: float) -> "FbmParams":
        """Copy with enough padding to evaluate difference quotients of width ``eps``."""
        pad = int(np.ceil(eps / self.dt - 1e-9))
        return FbmParams(self.H, self.d, self.T, self.n_steps, self.seed, max(pad, self.pad_steps))


@dataclass(frozen=True)
class FbmPath:
    params: FbmParams
    values: np.ndarray  # shape (d, n_total + 1), values[:, 0] == 0
    method: str = "circulant"
    replica: int | None = field(default=None, compare=False)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.params.n_total + 1) * self.params.dt

    @property
    def d(self) -> int:
        return self.params.d

    def on_horizon(self) -> np.ndarray:
        """Values restricted to the nodes of ``[0, T]``."""
        return self.values[:, : self.params.n_steps + 1]


@dataclass(frozen=True)
class DerivScheme:
    kind: SchemeKind
    eps: float

    def __post_init__(self) -> None:
        if self.kind not in ("forward", "symmetric"):
            raise ValueError(f"unknown scheme {self.kind!r}")
        if not self.eps > 0:
            raise ValueError("eps must be positive")

    def steps(self, dt: float) -> int:
        """Width in grid steps; raises when ``eps`` is not a grid multiple."""
        k = int(round(self.eps / dt))
        if k < 1 or abs(k * dt - self.eps) > 1e-9 * max(self.eps, dt):
            nearest = max(k, 1) * dt
            raise ValueError(
                f"eps={self.eps!r} is not a multiple of the grid step {dt!r}; "
                f"nearest admissible eps is {nearest!r}")
        return k


def fgn_autocovariance(H: float, n: int, dt: float = 1.0) -> np.ndarray:
    """Autocovariance of fBm increments over steps of length ``dt`` at lags 0..n."""
    k = np.arange(n + 1, dtype=float)
    two_h = 2.0 * H
    return 0.5 * dt**two_h * (np.abs(k + 1) ** two_h - 2.0 * k**two_h + np.abs(k - 1) ** two_h)


def fbm_covariance(H: float, s, t):
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    two_h = 2.0 * H
    return 0.5 * (np.abs(s) ** two_h + np.abs(t) ** two_h - np.abs(t - s) ** two_h)


@lru_cache(maxsize=64)
def _circulant_sqrt_eigs(H: float, n: int, dt: float) -> np.ndarray | None:
    gam = fgn_autocovariance(H, n, dt)
    row = np.concatenate([gam, gam[-2:0:-1]])
    lam = np.fft.fft(row).real
    if lam.min() < -1e-10 * lam.max():
        return None
    return np.sqrt(np.clip(lam, 0.0, None) / row.size)


@lru_cache(maxsize=16)
def _cholesky_factor(H: float, n: int, dt: float) -> np.ndarray:
    t = dt * np.arange(1, n + 1)
    cov = fbm_covariance(H, t[:, None], t[None, :])
    return np.linalg.cholesky(cov)


def _sample_components(p: FbmParams, rng: np.random.Generator,
                       method: str = "auto") -> tuple[np.ndarray, str]:
    n = p.n_total
    sq = _circulant_sqrt_eigs(p.H, n, p.dt) if method in ("auto", "circulant") else None
    out = np.zeros((p.d, n + 1))
    if sq is not None:
        m = sq.size
        for i in range(p.d):
            z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
            incr = np.fft.fft(sq * z).real[:n]
            out[i, 1:] = np.cumsum(incr)
        return out, "circulant"
    if method == "circulant":
        raise ValueError("circulant embedding is not nonnegative for these parameters")
    log.info("circulant embedding rejected for H=%s n=%d; using Cholesky", p.H, n)
    L = _cholesky_factor(p.H, n, p.dt)
    for i in range(p.d):
        out[i, 1:] = L @ rng.standard_normal(n)
    return out, "cholesky"


def sample_fbm(params: FbmParams, rng: np.random.Generator | None = None,
               method: str = "auto") -> FbmPath:
    """Sample one path; identical ``params`` (seed included) give identical output.

    ``method`` is ``"auto"`` (circulant, Cholesky fallback), ``"circulant"`` or
    ``"cholesky"``; the method actually used is recorded on the path.
    """
    if rng is None:
        rng = replica_rng(params.seed, 0)
    values, used = _sample_components(params, rng, method)
    return FbmPath(params, values, used)


def sample_fbm_batch(params: FbmParams, n_paths: int, threads: int | None = None,
                     method: str = "auto") -> list[FbmPath]:
    """``n_paths`` independent replicas; replica ``i`` is seeded by ``(params.seed, i)``."""

    def one(rng: np.random.Generator, i: int) -> FbmPath:
        values, used = _sample_components(params, rng, method)
        return FbmPath(params, values, used, replica=i)

    return run_replicas(one, n_paths, params.seed, threads)


def discrete_derivative(path: FbmPath, scheme: DerivScheme) -> np.ndarray:
    """Difference quotient at every node of ``[0, T]``, shape ``(d, n_steps + 1)``.

    Points before 0 are read as ``X_0 = 0``; points past the synthesised range
    hold the last synthesised value.
    """
    p = path.params
    k = scheme.steps(p.dt)
    idx = np.arange(p.n_steps + 1)
    last = p.n_total
    ahead = path.values[:, np.minimum(idx + k, last)]
    if scheme.kind == "forward":
        return (ahead - path.values[:, idx]) / scheme.eps
    behind = path.values[:, np.maximum(idx - k, 0)]
    return (ahead - behind) / (2.0 * scheme.eps)


def _stack(paths: Iterable[FbmPath] | np.ndarray) -> np.ndarray:
    if isinstance(paths, np.ndarray):
        return paths
    return np.stack([p.values for p in paths])


def _node(dt: float, t: float) -> int:
    k = int(round(t / dt))
    if abs(k * dt - t) > 1e-9 * max(dt, abs(t)):
        raise ValueError(f"time {t} is not on the grid of step {dt}")
    return k


def empirical_covariance(paths: Sequence[FbmPath] | np.ndarray, s: float, t: float,
                         component: int = 0, other: int | None = None,
                         dt: float | None = None) -> MCResult:
    """Sample covariance of ``X^i_s`` and ``X^j_t`` (``j = other`` or ``i``).

    Paths are mean zero, so the estimator is the average of ``X^i_s X^j_t``.
    """
    arr = _stack(paths)
    if arr.shape[0] < 100:
        raise ValueError(f"need at least 100 paths, got {arr.shape[0]}")
    if dt is None:
        if isinstance(paths, np.ndarray):
            raise ValueError("dt is required when passing a raw array")
        dt = paths[0].params.dt
    j = component if other is None else other
    prod = arr[:, component, _node(dt, s)] * arr[:, j, _node(dt, t)]
    return MCResult.from_samples(prod, s=s, t=t, component=component, other=j)


# -- serialisation ---------------------------------------------------------

def write_path_binary(path: FbmPath, dest: str | Path) -> None:
    """32-byte little-endian header followed by float64 values, component-major."""
    p = path.params
    with open(dest, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, p.d, p.n_steps, p.H, p.T, p.seed))
        fh.write(np.ascontiguousarray(path.values, dtype="<f8").tobytes())


def read_path_binary(src: str | Path) -> FbmPath:
    raw = Path(src).read_bytes()
    magic, d, n_steps, H, T, seed = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise ValueError("not an fBm path file")
    vals = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if vals.size % d:
        raise ValueError("truncated path file")
    vals = vals.reshape(d, -1).copy()
    pad = vals.shape[1] - 1 - n_steps
    return FbmPath(FbmParams(H, d, T, n_steps, seed, pad), vals)


def write_path_csv(path: FbmPath, dest: str | Path) -> None:
    with open(dest, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"x{i + 1}" for i in range(path.d)])
        for k, t in enumerate(path.times):
            w.writerow([repr(float(t))] + [repr(float(v)) for v in path.values[:, k]])
