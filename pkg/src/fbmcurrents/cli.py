"""Command-line driver: ``fbmcurrents <subcommand> [options]``.

Every run writes, under ``--out-dir``:

* ``<experiment>/<table>.csv``, one per table, with a schema stamp line
  ``# fbmcurrents:<table>:v<N>`` above the column header;
* ``<experiment>/summary.json`` with scalar results and the pass/fail checks;
* ``<experiment>/*.svg`` plots drawn from the CSVs when ``--plots`` is given;
* ``manifest.json`` with the config hash, seed, versions, parameter grids and a
  sha256 inventory of the files above. Wall-clock time and thread count sit in
  its ``runtime`` field, the only part that varies between identical runs.

Exit status: 0 when every check passes, 1 when a check fails, 2 for a bad
command line or config file, 130 on interrupt (finished experiments are kept).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import platform
import sys
import time
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import scipy

from . import __version__
from .experiments import (COLUMNS, DEFAULTS, EXPERIMENTS, SCHEMA_VERSION, Outcome, parse_measure,
                          resolve)
from .montecarlo import default_threads
from .paths import write_path_binary

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

GLOBAL_KEYS = {"seed": 0, "threads": 1, "out_dir": "out", "quick": False, "plots": False}


class ConfigError(Exception):
    """Raised for a malformed config; the message names the offending key path."""


# -- config ------------------------------------------------------------------------------

def _type_ok(value: Any, default: Any) -> bool:
    if isinstance(default, bool):
        return isinstance(value, bool)
    if isinstance(default, int):
        return isinstance(value, int) and not isinstance(value, bool)
    if isinstance(default, float):
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if isinstance(default, list):
        return isinstance(value, list) and (not default or not value
                                            or all(_type_ok(v, default[0]) for v in value))
    return isinstance(value, type(default))


def validate_config(raw: dict) -> dict:
    """Check keys and value types against the defaults; returns the raw dict."""
    for key, value in raw.items():
        if key in EXPERIMENTS:
            if not isinstance(value, dict):
                raise ConfigError(f"{key}: expected a table")
            for sub, v in value.items():
                if sub not in DEFAULTS[key]:
                    raise ConfigError(f"unknown config key {key}.{sub}")
                if not _type_ok(v, DEFAULTS[key][sub]):
                    raise ConfigError(f"{key}.{sub}: expected {type(DEFAULTS[key][sub]).__name__}, "
                                      f"got {v!r}")
        elif key in GLOBAL_KEYS:
            if not _type_ok(value, GLOBAL_KEYS[key]):
                raise ConfigError(f"{key}: expected {type(GLOBAL_KEYS[key]).__name__}, got {value!r}")
        else:
            raise ConfigError(f"unknown config key {key}")
    return raw


def load_config(path: str | Path | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config {path} is not valid TOML: {exc}") from exc
    return validate_config(raw)


def config_hash(resolved: dict) -> str:
    blob = json.dumps(resolved, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


# -- output -------------------------------------------------------------------------------

def _cell(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(dest: Path, table_name: str, table) -> None:
    with open(dest, "w", newline="") as fh:
        fh.write(f"# fbmcurrents:{table_name}:v{SCHEMA_VERSION}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([_cell(v) for v in row])


def read_csv(src: Path) -> tuple[list[str], list[list[str]]]:
    with open(src, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


def _jsonable(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def write_json(dest: Path, obj: Any) -> None:
    dest.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_outcome(out_dir: Path, name: str, params: dict, outcome: Outcome) -> list[Path]:
    sub = out_dir / name
    sub.mkdir(parents=True, exist_ok=True)
    files = []
    for tname, table in outcome.tables.items():
        dest = sub / f"{tname}.csv"
        write_csv(dest, tname, table)
        files.append(dest)
    for pname, path in outcome.artifacts.items():
        dest = sub / f"{pname}.fbm"
        write_path_binary(path, dest)
        files.append(dest)
    dest = sub / "summary.json"
    write_json(dest, {"experiment": name, "params": params, "summary": outcome.summary,
                      "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail}
                                 for c in outcome.checks]})
    files.append(dest)
    return files


# -- plots --------------------------------------------------------------------------------

def _plot_series(dest: Path, series: dict[str, tuple[list[float], list[float]]], xlabel: str,
                 ylabel: str, logx: bool = True, logy: bool = True) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for label, (x, y) in series.items():
        ax.plot(x, y, marker="o", ms=3, label=label)
    ax.set_xscale("log" if logx else "linear")
    ax.set_yscale("log" if logy else "linear")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(dest, format="svg", metadata={"Date": None})
    plt.close(fig)


def _group(rows: list[list[str]], header: list[str], keys: Sequence[str], x: str, y: str):
    out: dict[str, tuple[list[float], list[float]]] = {}
    ix, iy = header.index(x), header.index(y)
    ik = [header.index(k) for k in keys]
    for r in rows:
        label = ", ".join(f"{k}={float(r[i]):.3g}" if k != "scheme" else r[i] for k, i in zip(keys, ik))
        xs, ys = out.setdefault(label, ([], []))
        xs.append(float(r[ix]))
        ys.append(float(r[iy]))
    return out


def make_plots(out_dir: Path, name: str) -> list[Path]:
    sub = out_dir / name
    made = []
    specs = {
        "kernel-check": ("kernel_profile", ("d", "alpha"), "r", "K", "r", "K_alpha(r)"),
        "current-sweep": ("sweep", ("H", "scheme", "alpha"), "epsilon", "value", "eps", "E Z"),
        "vortex-energy": ("vortex", ("H",), "eps", "energy", "eps", "E energy"),
    }
    if name not in specs:
        return made
    table, keys, x, y, xl, yl = specs[name]
    header, rows = read_csv(sub / f"{table}.csv")
    finite = [r for r in rows if math.isfinite(float(r[header.index(y)]))]
    dest = sub / f"{table}.svg"
    _plot_series(dest, _group(finite, header, keys, x, y), xl, yl)
    made.append(dest)
    return made


# -- argument parsing -----------------------------------------------------------------------

def _columns_epilog() -> str:
    lines = ["CSV columns (each file starts with a '# fbmcurrents:<table>:v<N>' stamp):"]
    for tname, cols in COLUMNS.items():
        lines.append(f"  {tname}.csv")
        lines += [f"    {c:<16} {doc}" for c, doc in cols.items()]
    return "\n".join(lines)


def _common_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, help="TOML file with global keys and per-experiment tables")
    p.add_argument("--seed", type=int, default=S, help="base seed (default 0)")
    p.add_argument("--threads", type=int, default=S,
                   help="worker threads (default: $FBMCURRENTS_THREADS, else all cores)")
    p.add_argument("--out-dir", dest="out_dir", default=S, help="output directory (default ./out)")
    p.add_argument("--quick", action="store_true", default=S, help="acceptance-size runs")
    p.add_argument("--plots", action="store_true", default=S, help="write SVG plots (needs matplotlib)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="fbmcurrents", parents=[common],
        description="Reproducible experiments on regularised fBm currents.",
        epilog=_columns_epilog(), formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", metavar="subcommand", required=True)
    helps = {
        "kernel-check": "kernel closed forms and identities",
        "cov-table": "covariance atoms against closed forms and Monte Carlo",
        "fbm-sample": "sampler covariance check; writes sample paths",
        "current-sweep": "E Z threshold sweep, exact vs Monte Carlo, monotonicity in alpha",
        "wick-check": "Gaussian integration-by-parts suite",
        "wick-decompose": "per-replica A, B1, B2, Q, Z",
        "eta-field": "||eta||^2 on a grid against Z",
        "vortex-energy": "vortex energy expectation",
        "brownian-check": "Brownian moment, maximal and occupation checks",
        "full-suite": "all of the above",
    }
    for name, h in helps.items():
        sp = sub.add_parser(name, parents=[common], help=h, description=h)
        if name == "vortex-energy":
            S = argparse.SUPPRESS
            sp.add_argument("--measure", default=S, help="gaussian:SIGMA or dipole:SIGMA1,SIGMA2")
            sp.add_argument("--H", type=float, default=S, help="Hurst exponent of the sweep")
            sp.add_argument("--eps-grid", dest="eps_grid", default=S,
                            help="comma-separated widths, e.g. 0.125,0.0625")
            sp.add_argument("--mode", choices=("exact", "mc", "both"), default=S)
    return parser


def _overrides(name: str, ns: argparse.Namespace, cfg: dict) -> dict:
    o = dict(cfg.get(name, {}))
    if name == "vortex-energy":
        if hasattr(ns, "measure"):
            parse_measure(ns.measure)
            o["measure"] = ns.measure
        if hasattr(ns, "H"):
            o["H"] = ns.H
        if hasattr(ns, "eps_grid"):
            o["eps_grid"] = [float(e) for e in ns.eps_grid.split(",")]
        if hasattr(ns, "mode"):
            o["mode"] = ns.mode
    return o


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = load_config(getattr(ns, "config", None))
        g = {k: cfg.get(k, v) for k, v in GLOBAL_KEYS.items()}
        for k in ("seed", "out_dir", "quick", "plots"):
            if hasattr(ns, k):
                g[k] = getattr(ns, k)
        threads = ns.threads if hasattr(ns, "threads") else cfg.get("threads", default_threads())
        if threads < 1:
            raise ConfigError("threads must be >= 1")
        if not 0 <= g["seed"] < 2**63:
            raise ConfigError("seed must be a non-negative 64-bit integer")
        names = list(EXPERIMENTS) if ns.command == "full-suite" else [ns.command]
        params = {n: resolve(n, g["quick"], _overrides(n, ns, cfg)) for n in names}
    except (ConfigError, ValueError) as exc:
        print(f"fbmcurrents: error: {exc}", file=sys.stderr)
        return 2

    out_dir = Path(g["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    resolved = {"seed": g["seed"], "quick": g["quick"], "experiments": params}
    files: list[Path] = []
    timing: dict[str, float] = {}
    checks: dict[str, list] = {}
    status = 0
    interrupted = False
    try:
        for name in names:
            t0 = time.perf_counter()
            outcome = EXPERIMENTS[name](params[name], g["seed"], threads)
            files += write_outcome(out_dir, name, params[name], outcome)
            if g["plots"]:
                files += make_plots(out_dir, name)
            timing[name] = round(time.perf_counter() - t0, 3)
            checks[name] = [(c.name, c.passed) for c in outcome.checks]
            for c in outcome.checks:
                print(f"[{'PASS' if c.passed else 'FAIL'}] {name}: {c.name}  {c.detail}")
            if not all(c.passed for c in outcome.checks):
                status = 1
    except KeyboardInterrupt:
        interrupted = True
        status = 130
        print("fbmcurrents: interrupted; finished experiments were written", file=sys.stderr)

    manifest = {
        "config_hash": config_hash(resolved),
        "seed": g["seed"],
        "quick": g["quick"],
        "command": ns.command,
        "versions": {"fbmcurrents": __version__, "numpy": np.__version__,
                     "scipy": scipy.__version__, "python": platform.python_version()},
        "grids": params,
        "completed": list(timing),
        "interrupted": interrupted,
        "checks": {n: [{"name": c, "passed": p} for c, p in v] for n, v in checks.items()},
        "files": [{"path": f.relative_to(out_dir).as_posix(), "sha256": _sha256(f),
                   "bytes": f.stat().st_size} for f in files],
        "runtime": {"threads": threads, "wall_seconds": timing},
    }
    write_json(out_dir / "manifest.json", manifest)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
