"""Seeded, thread-count invariant Monte Carlo plumbing.

Every replica draws from its own generator, derived from ``(base_seed,
replica_index)`` through :class:`numpy.random.SeedSequence` spawn keys. The
replica results are collected by index and reduced in index order, so a run
produces the same numbers whatever the number of worker threads.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

THREADS_ENV = "FBMCURRENTS_THREADS"


@dataclass(frozen=True)
class MCResult:
    """Monte Carlo estimate of a scalar expectation."""

    mean: float
    stderr: float
    n: int
    seed: int | None = None
    meta: dict[str, Any] = field(default_factory=dict, compare=False)

    def zscore(self, reference: float) -> float:
        if self.stderr == 0.0:
            return 0.0 if self.mean == reference else float("inf")
        return (self.mean - reference) / self.stderr

    def within(self, reference: float, k: float = 4.0) -> bool:
        return abs(self.mean - reference) <= k * self.stderr

    @classmethod
    def from_samples(cls, samples: Sequence[float] | np.ndarray, seed: int | None = None,
                     **meta: Any) -> "MCResult":
        x = np.asarray(samples, dtype=float)
        if x.ndim != 1 or x.size == 0:
            raise ValueError("need a non-empty 1-d sample")
        n = x.size
        sd = float(x.std(ddof=1)) if n > 1 else 0.0
        return cls(float(x.mean()), sd / np.sqrt(n), n, seed, dict(meta))

    @classmethod
    def exact(cls, value: float, **meta: Any) -> "MCResult":
        return cls(float(value), 0.0, 0, None, dict(meta))


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def replica_rng(base_seed: int, index: int) -> np.random.Generator:
    """Independent generator for replica ``index`` of a run seeded with ``base_seed``."""
    ss = np.random.SeedSequence(entropy=int(base_seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.PCG64(ss))


def run_replicas(fn: Callable[[np.random.Generator, int], Any], n: int, base_seed: int,
                 threads: int | None = None) -> list[Any]:
    """Evaluate ``fn(rng, i)`` for ``i = 0..n-1``; results are returned in index order."""
    threads = default_threads() if threads is None else max(1, int(threads))

    def one(i: int) -> Any:
        return fn(replica_rng(base_seed, i), i)

    if threads == 1 or n == 1:
        return [one(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, range(n)))


def stderr_ratio(small: MCResult, large: MCResult) -> float:
    """Observed stderr shrink factor relative to the CLT prediction sqrt(n_small/n_large)."""
    return (large.stderr / small.stderr) / np.sqrt(small.n / large.n)


def hill_tail_index(samples: Sequence[float] | np.ndarray, k: int | None = None) -> float:
    """Hill estimate of the tail index of ``|samples|``; below 2 the variance is likely infinite."""
    x = np.sort(np.abs(np.asarray(samples, dtype=float)))[::-1]
    x = x[x > 0]
    k = max(10, int(np.sqrt(x.size))) if k is None else k
    if x.size <= k:
        return float("inf")
    xi = float(np.mean(np.log(x[:k] / x[k])))
    return float("inf") if xi == 0 else 1.0 / xi
