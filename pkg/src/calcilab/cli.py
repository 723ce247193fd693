"""Command-line front end.

Every subcommand loads a parameter file (duplicate of the published defaults
when omitted), runs one analysis, writes CSV/JSON results into --out-dir and
a ``report.json`` run report; the exit status is 0 exactly when every check
the subcommand performs passes.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bifurcation, blowup, cycles, gspt, model, reporting
from .integrate import IntegratorConfig, integrate
from .params import (CONVENTIONS, ParamsError, ScaledParams, default_scaled,
                     fingerprint, hat_scale, load_params, nondimensionalize)

__all__ = ["main", "RunConfig", "parse_args"]


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    params_path: str | None
    tier: str
    params: ScaledParams
    convention: str
    out_dir: Path
    rel_tol: float
    abs_tol: float
    emit_json: bool
    extra: dict

    @property
    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(rel_tol=self.rel_tol, abs_tol=self.abs_tol)


def _resolve_params(path):
    if path is None:
        return None, "scaled", default_scaled()
    loaded = load_params(path)
    tier = loaded.tier
    if tier == "dimensional":
        loaded = hat_scale(nondimensionalize(loaded))
    elif tier == "dimensionless":
        loaded = hat_scale(loaded)
    return str(path), tier, loaded


def parse_args(argv) -> RunConfig:
    parser = argparse.ArgumentParser(prog="calcilab",
                                     description=__doc__.splitlines()[0])
    parser.add_argument("--params", help="parameter file (key = value, with a tier key)")
    parser.add_argument("--convention", choices=CONVENTIONS, default="printed")
    parser.add_argument("--out-dir", default="calcilab-out")
    parser.add_argument("--rel-tol", type=float, default=1e-9)
    parser.add_argument("--abs-tol", type=float, default=1e-11)
    parser.add_argument("--json", action="store_true",
                        help="echo the run report to stdout")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    s = sub.add_parser("simulate", help="integrate the scaled system; CSV (t, h, c)")
    s.add_argument("--initial", default="0.5,0.5")
    s.add_argument("--t-span", default="0,40000")
    s.add_argument("--eps", type=float, default=None)

    s = sub.add_parser("manifold", help="rescaled critical curve; CSV (C, zeta, lambda, branch)")
    s.add_argument("--c-min", type=float, default=0.2)
    s.add_argument("--c-max", type=float, default=2.2)
    s.add_argument("--n", type=int, default=200)

    s = sub.add_parser("equilibria", help="reduced-flow equilibria; CSV (root_m, C_star, h_star, stable)")

    sub.add_parser("fold", help="fold point and nondegeneracy/regularity values")

    s = sub.add_parser("cycle", help="locate the relaxation cycle; orbit CSV + report")
    s.add_argument("--eps", type=float, default=None)
    s.add_argument("--section", type=float, default=None)

    s = sub.add_parser("converge-eps", help="cycle-to-singular-cycle convergence sweep")
    s.add_argument("--eps-list", default="0.001,0.0025,0.005,0.01")

    s = sub.add_parser("period-scan", help="leading-order period law vs simulation")

    s = sub.add_parser("branch", help="equilibrium branch continuation")
    s.add_argument("--axis", choices=bifurcation.AXES, default="c_t")
    s.add_argument("--from", dest="lo", type=float, default=0.4)
    s.add_argument("--to", dest="hi", type=float, default=1.3)

    s = sub.add_parser("hopf", help="branch + Andronov-Hopf detection")
    s.add_argument("--axis", choices=bifurcation.AXES, default="c_t")
    s.add_argument("--from", dest="lo", type=float, default=0.4)
    s.add_argument("--to", dest="hi", type=float, default=1.3)
    s.add_argument("--criticality", action="store_true")

    s = sub.add_parser("cusp", help="equilibrium-count map over (p, c_t)")
    s.add_argument("--p-min", type=float, default=0.005)
    s.add_argument("--p-max", type=float, default=0.05)
    s.add_argument("--ct-min", type=float, default=0.3)
    s.add_argument("--ct-max", type=float, default=1.4)
    s.add_argument("--grid", type=int, default=60)

    s = sub.add_parser("onset", help="oscillation amplitude scan in c_t")
    s.add_argument("--p", type=float, default=0.015)
    s.add_argument("--ct-min", type=float, default=0.9)
    s.add_argument("--ct-max", type=float, default=1.05)
    s.add_argument("--n", type=int, default=16)

    s = sub.add_parser("taumax-scan", help="period vs dimensionless gating time")
    s.add_argument("--values", default="60,90,115,130,160,250,500,2000,13600,27200,54400,108800")

    sub.add_parser("blowup-verify", help="run the blow-up chart verification suite")

    ns = parser.parse_args(argv)
    path, tier, params = _resolve_params(ns.params)
    reserved = {"params", "convention", "out_dir", "rel_tol", "abs_tol", "json",
                "subcommand"}
    extra = {k: v for k, v in vars(ns).items() if k not in reserved}
    return RunConfig(subcommand=ns.subcommand, params_path=path, tier=tier,
                     params=params, convention=ns.convention,
                     out_dir=Path(ns.out_dir), rel_tol=ns.rel_tol,
                     abs_tol=ns.abs_tol, emit_json=ns.json, extra=extra)


def _pair(text):
    a, b = (float(x) for x in text.split(","))
    return a, b


# ---------------------------------------------------------------------------
# subcommand runners: each returns (outputs, results, ok)


def _run_simulate(cfg: RunConfig):
    h0, c0 = _pair(cfg.extra["initial"])
    t0, t1 = _pair(cfg.extra["t_span"])
    eps = cfg.extra["eps"]
    field = model.make_rhs(cfg.params, eps)
    traj = integrate(field, (h0, c0), (t0, t1), cfg.integrator)
    rows = [(t, y[0], y[1]) for t, y in zip(traj.t, traj.y)]
    out = reporting.write_csv(cfg.out_dir / "timeseries.csv", "timeseries",
                              ("t", "h", "c"), rows, fingerprint(cfg.params),
                              cfg.convention)
    results = {"reason": traj.reason, "n_steps": traj.n_steps,
               "final": list(map(float, traj.y[-1]))}
    return [out], results, traj.reason == "time"


def _run_manifold(cfg: RunConfig):
    sp = cfg.params
    fold = gspt.fold_point(sp, cfg.convention)
    Cs = np.linspace(cfg.extra["c_min"], cfg.extra["c_max"], cfg.extra["n"])
    rows = []
    for C in Cs:
        branch = "S_a" if C < fold.C_F else "S_r"
        rows.append((C, gspt.zeta(C, sp, cfg.convention),
                     gspt.lambda_S(C, sp, cfg.convention), branch))
    out = reporting.write_csv(cfg.out_dir / "manifold.csv", "manifold",
                              ("C", "zeta", "lambda", "branch"), rows,
                              fingerprint(sp), cfg.convention)
    return [out], {"C_F": fold.C_F, "h_F": fold.h_F}, True


def _run_equilibria(cfg: RunConfig):
    sp = cfg.params
    cub = gspt.equilibria_cubic(sp, cfg.convention)
    rows = []
    for m, C in zip(cub.roots_m, cub.C_values):
        pt = gspt.manifold_point("S_r" if C > gspt.fold_point(sp, cfg.convention).C_F
                                 else "S_a", C, sp, cfg.convention)
        d = 1e-6 * max(C, 1.0)
        up = gspt.reduced_field(gspt.manifold_point(pt.branch, C + d, sp, cfg.convention),
                                sp, cfg.convention)[1]
        dn = gspt.reduced_field(gspt.manifold_point(pt.branch, C - d, sp, cfg.convention),
                                sp, cfg.convention)[1]
        stable = (up - dn) / (2 * d) < 0
        rows.append((m, C, model.h_inf_regime2(C, sp), stable))
    out = reporting.write_csv(cfg.out_dir / "equilibria.csv", "equilibria",
                              ("root_m", "C_star", "h_star", "stable"), rows,
                              fingerprint(sp), cfg.convention)
    results = {"root_count": len(cub.roots_m), "double_root": cub.double_root,
               "assumption_one": bifurcation_assumption(cfg)}
    return [out], results, True


def bifurcation_assumption(cfg: RunConfig):
    rep = gspt.check_assumption_one(cfg.params, cfg.convention)
    return dataclasses.asdict(rep)


def _run_fold(cfg: RunConfig):
    fold = gspt.fold_point(cfg.params, cfg.convention)
    results = dataclasses.asdict(fold)
    ok = fold.nondegeneracy[0] > 0 and fold.nondegeneracy[1] > 0
    return [], results, bool(ok)


def _run_cycle(cfg: RunConfig):
    sp = cfg.params
    cyc = cycles.find_limit_cycle(sp, eps=cfg.extra["eps"], config=cfg.integrator,
                                  section_value=cfg.extra["section"])
    rows = [(t, y[0], y[1]) for t, y in zip(cyc.t, cyc.states)]
    out = reporting.write_csv(cfg.out_dir / "cycle.csv", "cycle",
                              ("t", "h", "c"), rows, fingerprint(sp),
                              cfg.convention)
    results = {"period": cyc.period, "floquet": cyc.floquet, "eps": cyc.eps,
               "section_c": cyc.section_value, "closure_gap": cyc.closure_gap,
               "c_range": cyc.c_range, "h_range": cyc.h_range}
    ok = cyc.period > 0 and cyc.floquet < 0 and cyc.closure_gap < 1e-8
    return [out], results, bool(ok)


def _run_converge(cfg: RunConfig):
    sp = cfg.params
    eps_list = [float(x) for x in cfg.extra["eps_list"].split(",")]
    rep = cycles.eps_convergence_sweep(sp, eps_list, config=cfg.integrator)
    rows = [(r.eps, r.period, r.floquet, r.hausdorff) for r in rep.rows if r.ok]
    out = reporting.write_csv(cfg.out_dir / "convergence.csv", "convergence",
                              ("eps", "period", "floquet", "hausdorff"), rows,
                              fingerprint(sp), rep.convention)
    results = dataclasses.asdict(rep)
    ok = rep.survivors >= 2 and rep.floquet_negative
    return [out], results, bool(ok)


def _run_period_scan(cfg: RunConfig):
    sp = cfg.params
    est_p = cycles.period_estimate(sp, "printed")
    est_d = cycles.period_estimate(sp, "derived")
    cyc = cycles.find_limit_cycle(sp, config=cfg.integrator, with_floquet=False)
    rows = [(sp.hat_tau_max, est_p.order_estimate, est_p.refined, est_d.refined,
             cyc.period, cyc.period / est_p.order_estimate)]
    out = reporting.write_csv(cfg.out_dir / "period.csv", "period",
                              ("hat_tau_max", "order_estimate", "refined_printed",
                               "refined_derived", "simulated", "ratio_sim_over_order"),
                              rows, fingerprint(sp), cfg.convention)
    results = {"order_estimate": est_p.order_estimate,
               "v_printed": est_p.v, "v_derived": est_d.v,
               "refined_printed": est_p.refined, "refined_derived": est_d.refined,
               "quad_error": est_p.quad_error, "simulated": cyc.period,
               "ratio_sim_over_order": cyc.period / est_p.order_estimate}
    ok = 0.0 < results["ratio_sim_over_order"] <= 1.0
    return [out], results, bool(ok)


def _branch_rows(br):
    return [(p.param_value, p.state[0], p.state[1], p.trace, p.det, p.stability)
            for p in br.points]


def _run_branch(cfg: RunConfig):
    br = bifurcation.equilibrium_branch(cfg.params, cfg.extra["axis"],
                                        cfg.extra["lo"], cfg.extra["hi"])
    out = reporting.write_csv(cfg.out_dir / "branch.csv", "branch",
                              ("param", "h", "c", "trace", "det", "stability"),
                              _branch_rows(br), fingerprint(cfg.params),
                              cfg.convention)
    results = {"axis": br.axis, "n_points": len(br.points),
               "termination": br.termination,
               "max_residual": max((p.residual for p in br.points), default=None)}
    ok = len(br.points) > 2
    return [out], results, bool(ok)


def _run_hopf(cfg: RunConfig):
    br = bifurcation.equilibrium_branch(cfg.params, cfg.extra["axis"],
                                        cfg.extra["lo"], cfg.extra["hi"])
    hopfs = bifurcation.detect_hopf(br, cfg.params)
    if cfg.extra.get("criticality"):
        hopfs = [bifurcation.estimate_criticality(cfg.params, hp) for hp in hopfs]
    out = reporting.write_csv(cfg.out_dir / "branch.csv", "branch",
                              ("param", "h", "c", "trace", "det", "stability"),
                              _branch_rows(br), fingerprint(cfg.params),
                              cfg.convention)
    formula = bifurcation.hopf_value_formula(cfg.params)
    numeric = bifurcation.numeric_hopf_nu_max(cfg.params)
    results = {
        "axis": br.axis,
        "hopf_points": [dataclasses.asdict(hp) for hp in hopfs],
        "formula": dataclasses.asdict(formula),
        "numeric_rescaled": dataclasses.asdict(numeric),
        "termination": br.termination,
    }
    ok = all(abs(hp.trace) < 1e-8 and hp.det > 0 for hp in hopfs)
    return [out], results, bool(ok)


def _run_cusp(cfg: RunConfig):
    cm = bifurcation.cusp_scan(cfg.params,
                               (cfg.extra["p_min"], cfg.extra["p_max"]),
                               (cfg.extra["ct_min"], cfg.extra["ct_max"]),
                               cfg.extra["grid"], cfg.convention)
    rows = []
    for i, ct in enumerate(cm.ct_values):
        for j, pv in enumerate(cm.p_values):
            rows.append((pv, ct, int(cm.counts[i, j])))
    out1 = reporting.write_csv(cfg.out_dir / "cusp_grid.csv", "cusp_grid",
                               ("p", "c_t", "count"), rows,
                               fingerprint(cfg.params), cm.convention)
    out2 = reporting.write_csv(cfg.out_dir / "cusp_boundary.csv", "cusp_boundary",
                               ("p", "c_t"), list(cm.boundary),
                               fingerprint(cfg.params), cm.convention)
    results = {"vertex_p": cm.vertex[0], "vertex_ct": cm.vertex[1],
               "vertex_m": cm.vertex_m,
               "counts_present": sorted(set(int(c) for c in cm.counts.ravel()))}
    ok = all(c in (1, 2, 3) for c in results["counts_present"])
    return [out1, out2], results, bool(ok)


def _run_onset(cfg: RunConfig):
    sc = bifurcation.onset_scan_ct(cfg.params, cfg.extra["p"],
                                   (cfg.extra["ct_min"], cfg.extra["ct_max"]),
                                   cfg.extra["n"])
    rows = [(r.param_value, r.c_min, r.c_max, r.amplitude, r.oscillating)
            for r in sc.rows]
    out = reporting.write_csv(cfg.out_dir / "onset.csv", "onset",
                              ("c_t", "c_min", "c_max", "amplitude", "oscillating"),
                              rows, fingerprint(cfg.params), cfg.convention)
    results = {"jump_bracket": sc.jump_bracket, "resolution": sc.resolution}
    return [out], results, True


def _run_taumax(cfg: RunConfig):
    values = [float(x) for x in cfg.extra["values"].split(",")]
    sc = bifurcation.taumax_period_scan(cfg.params, values)
    rows = [(r.tau_tilde, r.period, r.c_max, r.c_min) for r in sc.rows if r.oscillating]
    out = reporting.write_csv(cfg.out_dir / "taumax_scan.csv", "taumax_scan",
                              ("tau_tilde", "period", "c_max", "c_min"), rows,
                              fingerprint(cfg.params), cfg.convention)
    results = {"ah": dataclasses.asdict(sc.ah_located),
               "slope_onset": sc.slope_onset,
               "slope_relaxation_fit": sc.slope_relaxation,
               "r2_relaxation": sc.r2_relaxation,
               "n_oscillating": sum(r.oscillating for r in sc.rows)}
    ok = results["n_oscillating"] >= 2
    return [out], results, bool(ok)


def _run_blowup_verify(cfg: RunConfig):
    rep = blowup.verify_all(cfg.params)
    out = reporting.write_json(cfg.out_dir / "blowup_verify.json", rep)
    return [out], {"all_pass": rep["all_pass"], "n_checks": rep["n_checks"]}, rep["all_pass"]


_RUNNERS = {
    "simulate": _run_simulate,
    "manifold": _run_manifold,
    "equilibria": _run_equilibria,
    "fold": _run_fold,
    "cycle": _run_cycle,
    "converge-eps": _run_converge,
    "period-scan": _run_period_scan,
    "branch": _run_branch,
    "hopf": _run_hopf,
    "cusp": _run_cusp,
    "onset": _run_onset,
    "taumax-scan": _run_taumax,
    "blowup-verify": _run_blowup_verify,
}


def run(cfg: RunConfig) -> dict:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    outputs, results, ok = _RUNNERS[cfg.subcommand](cfg)
    report = {
        "schema_version": reporting.SCHEMA_VERSION,
        "subcommand": cfg.subcommand,
        "params_fingerprint": fingerprint(cfg.params),
        "tier": cfg.tier,
        "convention": cfg.convention,
        "inputs": {"params": cfg.params_path, "rel_tol": cfg.rel_tol,
                   "abs_tol": cfg.abs_tol, **{k: str(v) for k, v in cfg.extra.items()}},
        "outputs": [str(p) for p in outputs] + [str(cfg.out_dir / "report.json")],
        "wall_time_s": round(time.perf_counter() - t0, 3),
        "pass": bool(ok),
        "results": results,
    }
    reporting.validate_report(report)
    reporting.write_json(cfg.out_dir / "report.json", report)
    return report


def main(argv=None) -> int:
    try:
        cfg = parse_args(sys.argv[1:] if argv is None else argv)
    except ParamsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        report = run(cfg)
    except ParamsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if cfg.emit_json:
        import json
        print(json.dumps(reporting._jsonable(report), sort_keys=True, indent=2))
    else:
        print(f"{cfg.subcommand}: {'pass' if report['pass'] else 'FAIL'} "
              f"({report['wall_time_s']}s); outputs in {cfg.out_dir}")
    return 0 if report["pass"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
