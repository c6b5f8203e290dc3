"""Batch experiments behind the command line.

Each ``run_*`` function takes a resolved parameter dict, a base seed and a
thread count, and returns an :class:`Outcome`: CSV-ready tables, a JSON-ready
summary and a list of pass/fail checks. Nothing here touches the file system.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import brownian, covariance, currents, kernel, paths, vortex, wick
from .montecarlo import MCResult, replica_rng, run_replicas, stderr_ratio

SCHEMA_VERSION = 1


@dataclass
class Table:
    columns: list[str]
    rows: list[list[Any]] = field(default_factory=list)

    def add(self, *row: Any) -> None:
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} fields, table has {len(self.columns)}")
        self.rows.append(list(row))


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Outcome:
    tables: dict[str, Table] = field(default_factory=dict)
    summary: dict[str, Any] = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    artifacts: dict[str, paths.FbmPath] = field(default_factory=dict)

    def check(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), detail))


# Documented CSV columns, per table name.
COLUMNS: dict[str, dict[str, str]] = {
    "kernel_profile": {"d": "dimension", "alpha": "kernel order", "r": "radius",
                       "K": "computed K_alpha(r)", "closed_form": "Bessel-K closed form",
                       "rel_err": "relative error"},
    "kernel_identities": {"identity": "name", "d": "dimension", "alpha": "kernel order",
                          "r": "radius (or nan)", "value": "computed value",
                          "reference": "reference value", "error": "error measure"},
    "cov": {"scheme": "difference quotient", "H": "Hurst exponent", "tau": "lag t - s",
            "eps": "mollification width", "c_exact": "Cov(D X_t, D X_s)",
            "c_reference": "displayed closed form", "b_exact": "derivative-increment covariance",
            "b_reference": "displayed closed form"},
    "cov_mc": {"scheme": "difference quotient", "H": "Hurst exponent", "t": "time", "s": "time",
               "eps": "width", "mc": "sample covariance", "stderr": "standard error",
               "exact": "cov_exact value", "z": "z-score"},
    "fbm_cov": {"H": "Hurst exponent", "s": "time", "t": "time", "empirical": "sample covariance",
                "stderr": "standard error", "exact": "fBm covariance", "z": "z-score"},
    "sweep": {"H": "Hurst exponent", "d": "dimension", "alpha": "kernel order", "epsilon": "width",
              "scheme": "difference quotient", "mode": "exact or mc", "value": "E Z",
              "stderr": "Monte Carlo standard error (0 for exact)"},
    "sweep_class": {"H": "Hurst exponent", "scheme": "difference quotient", "alpha": "order",
                    "alpha_H": "threshold", "slope": "log-log slope vs 1/eps",
                    "ratio": "max/min E Z", "dead_band_class": "slope-sign class",
                    "trend": "criterion class", "expected": "class predicted by alpha vs alpha_H"},
    "oracle": {"H": "Hurst exponent", "alpha": "order", "eps": "width", "exact": "deterministic E Z",
               "mc": "Monte Carlo mean", "stderr": "standard error", "z": "z-score"},
    "monotone": {"seed": "path seed", "alpha": "order", "Z": "per-path Z"},
    "wick": {"replica": "replica index", "A": "c-atom term", "B1": "K_{alpha-1} term",
             "B2": "K_alpha term", "Q": "remainder", "Z": "double integral"},
    "wick_check": {"case": "suite case", "lhs": "E[Z_l f(Z)]", "rhs": "sum_j C_lj E[d_j f]",
                   "zscore": "z-score of the difference", "n": "samples"},
    "eta": {"seed": "path seed", "Z": "double integral", "eta_norm2": "grid ||eta||^2",
            "tail_bound": "mass bound outside the box", "rel_gap": "(||eta||^2 - Z) / Z"},
    "vortex": {"H": "Hurst exponent", "eps": "width", "energy": "E energy",
               "stderr": "standard error (0 for exact)", "condition_flags": "finiteness flags"},
    "brownian": {"check": "name", "param": "parameter", "value": "estimate",
                 "stderr": "standard error", "reference": "bound or exact value", "ok": "1 if passed"},
}


def _geom(lo: float, hi: float, n: int) -> np.ndarray:
    return np.geomspace(lo, hi, int(n))


# -- kernel ------------------------------------------------------------------------

def run_kernel_check(p: dict, seed: int, threads: int) -> Outcome:
    out = Outcome()
    prof = Table(list(COLUMNS["kernel_profile"]))
    r = _geom(0.05, 5.0, p["n_radii"])
    closed = {(3, 1.0): lambda x: np.exp(-x) / (4 * np.pi * x), (1, 1.0): lambda x: 0.5 * np.exp(-x)}
    worst = 0.0
    for (d, a), f in closed.items():
        spec = kernel.KernelSpec(a, d)
        for x in r:
            k = kernel.eval_K(spec, float(x))
            e = abs(k / f(x) - 1)
            worst = max(worst, e)
            prof.add(d, a, float(x), k, float(f(x)), e)
    out.check("kernel closed forms", worst < 1e-6, f"max rel err {worst:.2e}")
    ids = Table(list(COLUMNS["kernel_identities"]))
    zworst = 0.0
    from scipy import special
    for d, a in ((1, 1.0), (3, 2.0), (2, 2.0)):
        spec = kernel.KernelSpec(a, d)
        ref = spec.gamma_const * special.gamma(a - d / 2)
        v = kernel.eval_K_zero(spec)
        zworst = max(zworst, abs(v / ref - 1))
        ids.add("K(0)", d, a, 0.0, v, float(ref), abs(v / ref - 1))
    out.check("K(0) closed form", zworst < 1e-10, f"max rel err {zworst:.2e}")
    nworst = 0.0
    for d, a in ((1, 1.0), (3, 2.0), (3, 1.0), (2, 1.5)):
        v, tail = kernel.normalization_integral(kernel.KernelSpec(a, d))
        nworst = max(nworst, abs(v - 1))
        ids.add("integral", d, a, float("nan"), v, 1.0, abs(v - 1))
    out.check("int K = 1", nworst < 1e-4, f"max abs err {nworst:.2e}")
    sworst = 0.0
    for x in (0.0, 0.5, 1.0):
        sg = kernel.check_semigroup(1.0, 1, x)
        sworst = max(sworst, sg.residual)
        ids.add("semigroup", 1, 1.0, x, sg.lhs, sg.rhs, sg.residual)
    out.check("semigroup residual", sworst < 1e-3, f"max residual {sworst:.2e}")
    lworst = 0.0
    for d, a in ((1, 2.0), (3, 2.0)):
        spec = kernel.KernelSpec(a, d)
        fd = kernel.radial_laplacian_fd(lambda x: kernel.eval_K(spec, x), 1.0, d)
        ref = -kernel.laplacian_K(spec, 1.0)
        # K_1 - K_2 vanishes at r = 1 when d = 1; measure against the size of the terms
        scale = max(abs(ref), kernel.eval_K(spec, 1.0), kernel.eval_K(spec.lowered(), 1.0))
        err = abs(fd - ref) / scale
        lworst = max(lworst, err)
        ids.add("laplacian", d, a, 1.0, fd, ref, err)
    out.check("finite-difference Laplacian", lworst < 1e-3, f"max rel err {lworst:.2e}")
    spec = kernel.KernelSpec(1.0, 3)
    slope = kernel.loglog_slope(spec, 1e-3, 1e-1)
    ref_slope = float(np.polyfit(np.log(_geom(1e-3, 1e-1, 41)),
                                 np.log(closed[(3, 1.0)](_geom(1e-3, 1e-1, 41))), 1)[0])
    ids.add("loglog-slope", 3, 1.0, float("nan"), slope, ref_slope, abs(slope - ref_slope))
    out.check("log-log slope vs closed form", abs(slope - ref_slope) < 1e-6,
              f"{slope:.4f} vs {ref_slope:.4f}")
    out.tables = {"kernel_profile": prof, "kernel_identities": ids}
    return out


# -- covariance -----------------------------------------------------------------------

def _derivative_mc(kind: str, H: float, eps: float, pairs, n_paths: int, seed: int,
                   threads: int) -> list[tuple[float, float, MCResult]]:
    n_steps = currents.steps_for(eps, 1.0)
    prm = paths.FbmParams(H, 1, 1.0, n_steps, seed).padded_for(eps)
    sch = paths.DerivScheme(kind, eps)
    idx = [(int(round(t / prm.dt)), int(round(s / prm.dt))) for t, s in pairs]

    def one(rng, i):
        D = paths.discrete_derivative(paths.sample_fbm(prm, rng), sch)[0]
        return [D[a] * D[b] for a, b in idx]

    prod = np.array(run_replicas(one, n_paths, seed, threads))
    return [(t, s, MCResult.from_samples(prod[:, j])) for j, (t, s) in enumerate(pairs)]


def run_cov_table(p: dict, seed: int, threads: int) -> Outcome:
    out = Outcome()
    tab = Table(list(COLUMNS["cov"]))
    # dyadic lags keep every stencil point exact in floating point
    taus = [2.0**-k for k in p["tau_exponents"]]
    epss = [2.0**-k for k in p["eps_exponents"]]
    worst = 0.0
    for kind in ("symmetric", "forward"):
        for H in p["H"]:
            for row in covariance.cov_table(kind, H, taus, epss):
                tab.add(kind, H, *row.values())
                err = abs(row["c_exact"] - row["c_reference"]) / row["tau"] ** (2 * H - 2)
                worst = max(worst, err)
    out.check("D-D atom vs closed form", worst < 1e-12, f"max scaled err {worst:.2e}")
    mc = Table(list(COLUMNS["cov_mc"]))
    zmax = 0.0
    for kind in ("symmetric", "forward"):
        for H in p["H"]:
            for t, s, r in _derivative_mc(kind, H, p["mc_eps"], p["mc_pairs"], p["n_paths"], seed, threads):
                ex = float(covariance.cov_exact(kind, H, t, s, p["mc_eps"]).c)
                z = r.zscore(ex)
                zmax = max(zmax, abs(z))
                mc.add(kind, H, t, s, p["mc_eps"], r.mean, r.stderr, ex, z)
    out.check("MC derivative covariances", zmax < 4, f"max |z| {zmax:.2f}")
    out.summary = {
        "phi_limit": {str(H): covariance.phi_limit(H) for H in p["H"]},
        "b_limit": {f"{k}/{H}": covariance.b_limit(k, H) for k in ("symmetric", "forward") for H in p["H"]},
        "bound_constants": {f"{k}/{H}": covariance.bound_constants(k, H, taus, epss)
                            for k in ("symmetric", "forward") for H in p["H"]},
    }
    out.tables = {"cov": tab, "cov_mc": mc}
    return out


# -- fBm sampler -------------------------------------------------------------------------

def run_fbm_sample(p: dict, seed: int, threads: int) -> Outcome:
    out = Outcome()
    tab = Table(list(COLUMNS["fbm_cov"]))
    zmax = 0.0
    samples = {}
    for H in p["H"]:
        prm = paths.FbmParams(H, 1, 1.0, p["n_steps"], seed)
        batch = paths.sample_fbm_batch(prm, p["n_paths"], threads)
        samples[H] = batch[0]
        for s, t in p["pairs"]:
            r = paths.empirical_covariance(batch, s, t)
            ex = float(paths.fbm_covariance(H, s, t))
            z = r.zscore(ex)
            zmax = max(zmax, abs(z))
            tab.add(H, s, t, r.mean, r.stderr, ex, z)
    out.check("fBm covariance", zmax < 4, f"max |z| {zmax:.2f}")
    out.tables = {"fbm_cov": tab}
    out.summary = {"methods": {str(H): samples[H].method for H in p["H"]}}
    out.artifacts = {f"fbm_H{H}": samples[H] for H in p["H"]}
    return out


# -- currents -------------------------------------------------------------------------------

def _expected_class(alpha: float, H: float, d: int) -> str:
    return "bounded" if alpha > covariance.alpha_H(H, d) else "diverging"


def run_current_sweep(p: dict, seed: int, threads: int) -> Outcome:
    out = Outcome()
    d = p["d"]
    eps = [2.0**-k for k in range(p["k_min"], p["k_max"] + 1)]
    sweep = Table(list(COLUMNS["sweep"]))
    cls = Table(list(COLUMNS["sweep_class"]))
    for kind, Hs in (("symmetric", p["H_symmetric"]), ("forward", p["H_forward"])):
        for H in Hs:
            aH = covariance.alpha_H(H, d)
            alphas = p["alphas_half"] if H == 0.5 else [aH + 0.5, aH - 0.5]
            if kind == "forward" and H > 0.5:
                # alpha_H - 0.5 lies below the integrability threshold here; add a finite diverging order
                alphas = alphas + [aH - 0.2]
            st = currents.threshold_sweep(H, d, alphas, eps, kind, "exact")
            for row in st.rows:
                sweep.add(row.H, row.d, row.alpha, row.eps, row.scheme, row.mode, row.value, row.stderr)
            for a in alphas:
                exp = _expected_class(a, H, d)
                cls.add(H, kind, a, aH, st.slopes[a], st.ratios[a], st.classes[a], st.trends[a], exp)
                ok = st.trends[a] == exp
                crit = (f"ratio {st.ratios[a]:.3f} < 2" if exp == "bounded"
                        else f"slope {st.slopes[a]:.3f} > 0.2")
                out.check(f"threshold {kind} H={H} alpha={a:.3f} {exp}", ok, crit)
    oracle = Table(list(COLUMNS["oracle"]))
    for H in p["oracle_H"]:
        a = covariance.alpha_H(H, d) + 0.5
        for e in p["oracle_eps"]:
            ex = currents.expected_Z_exact(H, d, a, "symmetric", e).value
            m = currents.mc_expected_Z(H, d, a, "symmetric", e, 1.0, p["n_replicas"], seed, threads)
            z = m.zscore(ex)
            oracle.add(H, a, e, ex, m.mean, m.stderr, z)
            out.check(f"oracle H={H} eps={e}", abs(z) < 3, f"z = {z:.2f}")
    mono = Table(list(COLUMNS["monotone"]))
    bad = 0
    sch = paths.DerivScheme("symmetric", p["mono_eps"])
    prm = paths.FbmParams(0.5, d, 1.0, currents.steps_for(p["mono_eps"], 1.0), 0).padded_for(p["mono_eps"])
    for s in range(seed, seed + p["mono_seeds"]):
        path = paths.sample_fbm(paths.FbmParams(prm.H, d, 1.0, prm.n_steps, s, prm.pad_steps))
        z = currents.Z_over_alphas(path, p["mono_alphas"], sch)
        for a, v in zip(p["mono_alphas"], z):
            mono.add(s, a, float(v))
        bad += int(np.any(np.diff(z) > 1e-10 * np.abs(z[:-1])))
    out.check("per-path monotonicity in alpha", bad == 0, f"{bad} of {p['mono_seeds']} paths violate")
    out.tables = {"sweep": sweep, "sweep_class": cls, "oracle": oracle, "monotone": mono}
    return out


def run_wick_decompose(p: dict, seed: int, threads: int) -> Outcome:
    out = Outcome()
    H, d, a, e = p["H"], p["d"], p["alpha"], p["eps"]
    sch = paths.DerivScheme("symmetric", e)
    prm = paths.FbmParams(H, d, 1.0, currents.steps_for(e, 1.0), seed).padded_for(e)

    def one(rng, i):
        w = currents.wick_decompose(paths.sample_fbm(prm, rng), a, sch)
        return [w.A, w.B1, w.B2, w.Q, w.Z]

    rows = np.array(run_replicas(one, p["n_replicas"], seed, threads))
    tab = Table(list(COLUMNS["wick"]))
    for i, r in enumerate(rows):
        tab.add(i, *map(float, r))
    q = MCResult.from_samples(rows[:, 3], seed)
    ident = float(np.max(np.abs(rows[:, 0] + rows[:, 1] - rows[:, 2] + rows[:, 3] - rows[:, 4])))
    out.check("E Q = 0", q.within(0.0, 4), f"mean {q.mean:.3g} +/- {q.stderr:.2g}")
    out.check("A >= 0", rows[:, 0].min() >= -1e-12, f"min A {rows[:, 0].min():.3g}")
    out.check("A + B1 - B2 + Q = Z", ident < 1e-10, f"max residual {ident:.1e}")
    out.summary = {"mean": dict(zip(["A", "B1", "B2", "Q", "Z"], map(float, rows.mean(axis=0)))),
                   "Q_stderr": q.stderr}
    out.tables = {"wick": tab}
    return out


def run_eta_field(p: dict, seed: int, threads: int) -> Outcome:
    out = Outcome()
    H, d, a, e = p["H"], p["d"], p["alpha"], p["eps"]
    sch = paths.DerivScheme("symmetric", e)
    prm = paths.FbmParams(H, d, 1.0, currents.steps_for(e, 1.0), 0).padded_for(e)
    tab = Table(list(COLUMNS["eta"]))

    def one(rng, i):
        s = seed + i
        path = paths.sample_fbm(paths.FbmParams(H, d, 1.0, prm.n_steps, s, prm.pad_steps))
        z = currents.Z_double_integral(path, a, sch).value
        f = currents.eta_field(path, a, sch, spacing=p["spacing"], margin=p["margin"])
        return s, z, f.norm2(), f.tail_bound

    worst = 0.0
    for s, z, n2, tail in run_replicas(one, p["n_seeds"], seed, threads):
        gap = (n2 - z) / z
        worst = max(worst, abs(gap))
        tab.add(s, z, n2, tail, gap)
    out.check("||eta||^2 vs Z", worst < 0.05, f"max rel gap {worst:.3%}")
    out.tables = {"eta": tab}
    return out


# -- Wick identity ----------------------------------------------------------------------------

def run_wick_check(p: dict, seed: int, threads: int) -> Outcome:
    out = Outcome()
    rep = wick.run_suite(p["n_samples"], seed, threads)
    tab = Table(list(COLUMNS["wick_check"]))
    for name, r in rep.items():
        if name == "char-function":
            continue
        tab.add(name, r["lhs"], r["rhs"], r["zscore"], r["n"])
        out.check(f"wick {name}", r["zscore"] < 3, f"z = {r['zscore']:.2f}")
    cf = rep["char-function"]
    out.check("characteristic function", cf["rel_error"] < 1e-3, f"rel err {cf['rel_error']:.1e}")
    out.summary = rep
    out.tables = {"wick_check": tab}
    return out


# -- vortex ------------------------------------------------------------------------------------

def parse_measure(text: str) -> vortex.SpectralMeasure:
    """``gaussian:sigma`` or ``dipole:sigma1,sigma2``."""
    kind, _, args = text.partition(":")
    vals = [float(v) for v in args.split(",")] if args else []
    if kind == "gaussian":
        return vortex.SpectralMeasure.gaussian(*(vals or [1.0]))
    if kind == "dipole" and len(vals) == 2:
        return vortex.SpectralMeasure.dipole(*vals)
    raise ValueError(f"cannot parse measure {text!r}; use gaussian:S or dipole:S1,S2")


def run_vortex_energy(p: dict, seed: int, threads: int) -> Outcome:
    out = Outcome()
    m = parse_measure(p["measure"])
    rng = replica_rng(seed, 0)
    q = rng.standard_normal((200, 3))
    G = vortex.FourierKernel(m)(q)
    proj = float(np.max(np.abs(np.einsum("nij,nj->ni", G, q))) / np.max(np.abs(G)))
    out.check("g^(q) q = 0", proj < 1e-14, f"max rel {proj:.1e}")
    g1 = vortex.SpectralMeasure.gaussian(1.0)
    si = vortex.spectral_integral(g1, 0.5)
    out.check("spectral integral gaussian H=1/2", abs(si / (2 * np.pi**1.5) - 1) < 1e-6, f"{si:.10f}")
    cg = vortex.check_conditions(g1, 0.5, 2.0)
    cd = vortex.check_conditions(vortex.SpectralMeasure.dipole(1.0, 2.0), 0.5, 2.0)
    out.check("gaussian fails, dipole passes the Sobolev bound",
              cg.sobolev_condition is False and cd.sobolev_condition is True,
              f"gaussian origin: {cg.sobolev_witness.get('origin')}; "
              f"dipole origin: {cd.sobolev_witness.get('origin')}")
    tab = Table(list(COLUMNS["vortex"]))
    eps = [float(e) for e in p["eps_grid"]]
    cond = vortex.check_conditions(m, p["H"], 2.0)
    flags = f"sobolev={cond.sobolev_condition};spectral_finite={cond.spectral_finite}"
    if p["mode"] in ("exact", "both"):
        vals, ratio = vortex.energy_sweep(p["H"], m, eps)
        for e, v in zip(eps, vals):
            tab.add(p["H"], e, float(v), 0.0, flags)
        out.check(f"energy sweep ratio H={p['H']}", ratio < 3, f"max/min {ratio:.3f}")
    mc_H, mc_eps = p["mc_H"], p["mc_eps"]
    ex = vortex.expected_energy_exact(mc_H, m, mc_eps).value
    if p["mode"] in ("mc", "both"):
        r = vortex.mc_expected_energy(mc_H, m, mc_eps, 1.0, p["n_replicas"], seed, threads)
        tab.add(mc_H, mc_eps, r.mean, r.stderr, flags)
        out.check(f"MC energy vs exact H={mc_H} eps={mc_eps}", abs(r.zscore(ex)) < 3,
                  f"z = {r.zscore(ex):.2f}")
    out.summary = {"exact_at_mc_config": ex, "spectral_integral": cond.spectral_integral,
                   "conditions": {"sobolev": cond.sobolev_condition,
                                  "spectral_finite": cond.spectral_finite}}
    out.tables = {"vortex": tab}
    return out


# -- Brownian ------------------------------------------------------------------------------------

def run_brownian_check(p: dict, seed: int, threads: int) -> Outcome:
    out = Outcome()
    tab = Table(list(COLUMNS["brownian"]))
    case = brownian.BesselMomentCase(3, 1.0, 2.0, (1.0, 0.0, 0.0), n_paths=p["n_bessel"], seed=seed)
    r = brownian.bessel_moment_estimates(case, threads)
    err = abs(r.lhs.mean - case.T ** (case.q / 2))
    tab.add("bessel-theta1", "theta=1", r.lhs.mean, r.lhs.stderr, 1.0, int(err < 1e-12))
    out.check("theta = 1 exact", err < 1e-12, f"abs err {err:.1e}")
    for th in (0.5, 0.75):
        for n in (p["n_bessel"], 10 * p["n_bessel"]):
            c = brownian.BesselMomentCase(3, th, 2.0, (1.0, 0.0, 0.0), n_paths=n, seed=seed)
            rr = brownian.bessel_moment_estimates(c, threads)
            tab.add("bessel-lhs", f"theta={th};n={n}", rr.lhs.mean, rr.lhs.stderr,
                    rr.ratio, int(np.isfinite(rr.ratio)))
    rows = brownian.maximal_exceedance(p["radii"], p["d_max"], 1.0, p["n_exceed"], seed=seed,
                                       threads=threads)
    for row in rows:
        tab.add("max-exceedance", f"|x|={row.radius}", row.frequency, row.stderr, row.bound, int(row.within))
        out.check(f"maximal inequality |x|={row.radius}", row.within,
                  f"{row.frequency:.4f} vs bound {row.bound:.4f}")
    a = brownian.occupation_integral_estimate(2, 1.8, 1.5, 1.0, p["n_occupation"], seed, threads=threads)
    b = brownian.occupation_integral_estimate(2, 1.8, 1.5, 1.0, 2 * p["n_occupation"], seed + 1,
                                              threads=threads)
    sr = stderr_ratio(a.estimate, b.estimate)
    diff = abs(a.estimate.mean - b.estimate.mean) / np.hypot(a.estimate.stderr, b.estimate.stderr)
    ok = a.condition and abs(sr - 1) < 0.2 and diff < 3 and not (a.flags or b.flags)
    for res, n in ((a, p["n_occupation"]), (b, 2 * p["n_occupation"])):
        tab.add("occupation", f"d=2;alpha=1.8;p'=1.5;n={n}", res.estimate.mean, res.estimate.stderr,
                float("nan"), int(ok))
    out.check("occupation integral stable under doubling", ok,
              f"stderr ratio {sr:.3f}, difference {diff:.2f} sigma")
    v = brownian.occupation_condition(3, 1.2, 4.0)
    out.check("condition flag (d=3, alpha=1.2, p'=4) violated", not v)
    out.tables = {"brownian": tab}
    out.summary = {"bessel_flags": r.flags}
    return out


EXPERIMENTS: dict[str, Callable[[dict, int, int], Outcome]] = {
    "kernel-check": run_kernel_check,
    "cov-table": run_cov_table,
    "fbm-sample": run_fbm_sample,
    "current-sweep": run_current_sweep,
    "wick-check": run_wick_check,
    "wick-decompose": run_wick_decompose,
    "eta-field": run_eta_field,
    "vortex-energy": run_vortex_energy,
    "brownian-check": run_brownian_check,
}

DEFAULTS: dict[str, dict[str, Any]] = {
    "kernel-check": {"n_radii": 20},
    "cov-table": {"H": [0.3, 0.5, 0.7], "tau_exponents": list(range(8)),
                  "eps_exponents": list(range(1, 11)), "mc_eps": 0.05,
                  "mc_pairs": [[0.5, 0.5], [0.5, 0.45], [0.5, 0.4], [0.8, 0.2], [0.025, 0.025]],
                  "n_paths": 10_000},
    "fbm-sample": {"H": [0.3, 0.5, 0.7], "n_steps": 256, "n_paths": 10_000,
                   "pairs": [[0.25, 0.25], [0.5, 0.5], [1.0, 1.0], [0.25, 0.5], [0.25, 1.0],
                             [0.5, 1.0], [0.125, 0.875], [0.75, 0.8125], [0.0625, 0.5], [0.375, 0.625]]},
    "current-sweep": {"d": 3, "k_min": 3, "k_max": 9, "H_symmetric": [0.5, 0.35],
                      "H_forward": [0.5, 0.7], "alphas_half": [2.0, 1.0],
                      "oracle_H": [0.3, 0.5, 0.7], "oracle_eps": [0.1, 0.05], "n_replicas": 1000,
                      "mono_eps": 0.05, "mono_alphas": [1.2, 1.6, 2.0, 2.5], "mono_seeds": 20},
    "wick-check": {"n_samples": 1_000_000},
    "wick-decompose": {"H": 0.5, "d": 3, "alpha": 2.0, "eps": 0.05, "n_replicas": 2000},
    "eta-field": {"H": 0.5, "d": 3, "alpha": 2.0, "eps": 0.05, "n_seeds": 5, "spacing": 0.2,
                  "margin": 4.0},
    "vortex-energy": {"measure": "gaussian:1", "H": 0.4, "eps_grid": [2.0**-k for k in range(3, 9)],
                      "mode": "both", "mc_H": 0.5, "mc_eps": 0.05, "n_replicas": 1000},
    "brownian-check": {"n_bessel": 1000, "radii": [2.0, 4.0, 8.0], "d_max": 2, "n_exceed": 10_000,
                       "n_occupation": 5000},
}

# Larger sizes used unless --quick is given; DEFAULTS are the acceptance sizes.
FULL: dict[str, dict[str, Any]] = {
    "cov-table": {"n_paths": 40_000},
    "fbm-sample": {"n_paths": 40_000},
    "current-sweep": {"k_max": 10, "n_replicas": 4000},
    "wick-check": {"n_samples": 4_000_000},
    "wick-decompose": {"n_replicas": 8000},
    "eta-field": {"n_seeds": 10, "spacing": 0.1},
    "vortex-energy": {"n_replicas": 4000},
    "brownian-check": {"n_exceed": 100_000, "n_occupation": 20_000},
}


def resolve(name: str, quick: bool, overrides: dict | None = None) -> dict[str, Any]:
    """Parameters for experiment ``name``: defaults, then full-size values, then ``overrides``."""
    p = dict(DEFAULTS[name])
    if not quick:
        p.update(FULL.get(name, {}))
    p.update(overrides or {})
    return p
