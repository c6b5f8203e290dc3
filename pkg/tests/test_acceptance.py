"""The thirteen acceptance criteria at their stated sizes and tolerances.

Each test prints one PASS/FAIL line, collected in the terminal summary.
Run directly with ``python3 tests/test_acceptance.py`` for the lines alone.
"""

import sys
import time
from functools import cache
from pathlib import Path

import pytest

from fbmcurrents import cli
from fbmcurrents.experiments import EXPERIMENTS, resolve


@cache
def outcome(name):
    t0 = time.perf_counter()
    out = EXPERIMENTS[name](resolve(name, quick=True), 0, 1)
    return out, time.perf_counter() - t0


def judge(report, number, name, select, max_seconds=None):
    out, secs = outcome(name)
    checks = [c for c in out.checks if select(c.name)]
    assert checks, f"no checks selected for criterion {number}"
    ok = all(c.passed for c in checks)
    detail = "; ".join(f"{c.name}: {c.detail}" for c in checks)
    if max_seconds is not None:
        ok = ok and secs < max_seconds
        detail += f"; {secs:.1f} s (limit {max_seconds} s)"
    report(number, ok, f"{name}: {detail}")
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def named(*names):
    return lambda n: n in names


def prefixed(*prefixes):
    return lambda n: n.startswith(prefixes)


def test_criterion_01_kernel_closed_forms(report):
    judge(report, 1, "kernel-check", named("kernel closed forms", "K(0) closed form"), 5)


def test_criterion_02_kernel_identities(report):
    judge(report, 2, "kernel-check",
          named("int K = 1", "semigroup residual", "finite-difference Laplacian"), 30)


def test_criterion_03_fbm_sampler(report):
    judge(report, 3, "fbm-sample", named("fBm covariance"), 60)


def test_criterion_04_covariance_algebra(report):
    judge(report, 4, "cov-table", named("D-D atom vs closed form", "MC derivative covariances"))


def test_criterion_05_eta_norm(report):
    judge(report, 5, "eta-field", named("||eta||^2 vs Z"), 60)


def test_criterion_06_monotonicity(report):
    judge(report, 6, "current-sweep", named("per-path monotonicity in alpha"))


def test_criterion_07_wick(report):
    judge(report, 7, "wick-check", prefixed("wick ", "characteristic function"))


def test_criterion_08_oracle(report):
    # the oracle matrix shares the current-sweep run; its own cost is well inside the limit
    judge(report, 8, "current-sweep", prefixed("oracle "), 180)


def test_criterion_09_threshold(report):
    judge(report, 9, "current-sweep", prefixed("threshold "))


def test_criterion_10_wick_decomposition(report):
    judge(report, 10, "wick-decompose", named("E Q = 0", "A >= 0", "A + B1 - B2 + Q = Z"))


def test_criterion_11_vortex(report):
    judge(report, 11, "vortex-energy", lambda n: True)


def test_criterion_12_brownian(report):
    judge(report, 12, "brownian-check",
          prefixed("theta = 1", "maximal inequality", "occupation integral"))


PINNED = """\
seed = 7

[cov-table]
n_paths = 2000
tau_exponents = [0, 3, 6]
eps_exponents = [2, 6]

[fbm-sample]
n_paths = 1000

[current-sweep]
k_max = 6
n_replicas = 100
mono_seeds = 4
oracle_eps = [0.1]

[wick-check]
n_samples = 100000

[wick-decompose]
n_replicas = 100

[eta-field]
n_seeds = 2

[vortex-energy]
eps_grid = [0.125, 0.0625, 0.03125, 0.015625]
n_replicas = 60

[brownian-check]
n_bessel = 200
n_exceed = 2000
n_occupation = 500
"""


def test_criterion_13_determinism(report, tmp_path):
    cfg = tmp_path / "pinned.toml"
    cfg.write_text(PINNED)
    for t in (1, 8):
        code = cli.main(["full-suite", "--quick", "--config", str(cfg), "--threads", str(t),
                         "--out-dir", str(tmp_path / f"t{t}")])
        assert code in (0, 1)
    a = sorted(p.relative_to(tmp_path / "t1") for p in (tmp_path / "t1").rglob("*.csv"))
    b = sorted(p.relative_to(tmp_path / "t8") for p in (tmp_path / "t8").rglob("*.csv"))
    differ = [str(p) for p in a if (tmp_path / "t1" / p).read_bytes() != (tmp_path / "t8" / p).read_bytes()]
    ok = a == b and len(a) >= 14 and not differ
    detail = f"{len(a)} CSV files compared, {len(differ)} differ {differ}"
    report(13, ok, detail)
    print(f"criterion 13: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


if __name__ == "__main__":
    sys.exit(pytest.main([str(Path(__file__)), "-q", "-p", "no:cacheprovider"]))
