"""Equilibrium branches, Andronov-Hopf detection, cusp map and onset scans.

Equilibria of the planar system have the gating variable slaved to calcium
(the gating nullcline is a graph h = H(c)), so branches are continued as the
zero set of the one-dimensional calcium balance in the (c, parameter) plane
with a pseudo-arclength corrector; this rounds the folds of the S-shaped
branch.  Stability data (trace, determinant) always comes from the full 2x2
Jacobian by central differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace as dc_replace

import numpy as np
from scipy.optimize import brentq, fsolve

from . import cycles, gspt, model
from .integrate import IntegratorConfig, integrate
from .params import ScaledParams, a_serca, derived_constants

__all__ = [
    "EquilibriumBranchPoint",
    "BranchResult",
    "HopfPoint",
    "HopfFormulaReport",
    "NumericHopf",
    "CuspMap",
    "OnsetRow",
    "OnsetScan",
    "TauScanRow",
    "TauScan",
    "equilibrium_branch",
    "detect_hopf",
    "estimate_criticality",
    "hopf_value_formula",
    "numeric_hopf_nu_max",
    "numeric_hopf_taumax",
    "analytic_trace_det_rescaled",
    "cusp_scan",
    "count_roots_brute",
    "onset_scan_ct",
    "taumax_period_scan",
]

AXES = ("c_t", "p", "nu_max")
NEWTON_TOL = 1e-10
HOPF_PARAM_TOL = 1e-6


def _with_param(params: ScaledParams, axis: str, value: float) -> ScaledParams:
    if axis == "c_t":
        return dc_replace(params, c_t=value)
    if axis == "p":
        return dc_replace(params, p=value)
    raise ValueError(f"axis {axis!r} cannot be set on the scaled parameters")


def _h_slaved(c: float, sp: ScaledParams) -> float:
    kh4e = sp.eps**2 * sp.hat_K_h**4
    return kh4e / (kh4e + c**4)


def _balance(c: float, sp: ScaledParams) -> float:
    return model.rhs_full((_h_slaved(c, sp), c), sp)[1]


def _jacobian_full(state, sp: ScaledParams, step=1e-8):
    h, c = state
    J = np.zeros((2, 2))
    for j, (dh, dc) in enumerate(((step, 0.0), (0.0, step))):
        fp = model.rhs_full((h + dh, c + dc), sp)
        fm = model.rhs_full((h - dh, c - dc), sp)
        J[:, j] = (fp - fm) / (2.0 * step)
    return J


def _stability(trace: float, det: float) -> str:
    if det < 0.0:
        return "saddle"
    return "stable" if trace < 0.0 else "unstable"


@dataclass(frozen=True)
class EquilibriumBranchPoint:
    axis: str
    param_value: float
    state: tuple          # (h, c) of the full system, or (h, C) on the nu_max axis
    trace: float
    det: float
    stability: str
    residual: float


@dataclass(frozen=True)
class BranchResult:
    axis: str
    points: tuple
    termination: str


def _branch_point(axis, lam, c, sp) -> EquilibriumBranchPoint:
    st = (_h_slaved(c, sp), c)
    J = _jacobian_full(st, sp)
    tr, det = J[0, 0] + J[1, 1], J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
    res = abs(_balance(c, sp))
    return EquilibriumBranchPoint(axis=axis, param_value=lam, state=st,
                                  trace=tr, det=det, stability=_stability(tr, det),
                                  residual=res)


def equilibrium_branch(params: ScaledParams, axis: str, lo: float, hi: float,
                       max_points: int = 2000, ds: float = 0.004,
                       c_seed: float | None = None) -> BranchResult:
    """Pseudo-arclength continuation of the equilibrium branch over [lo, hi].

    Secant predictor, Newton corrector with step adaptation on the iteration
    count; folds in the parameter are rounded.  Points outside [lo, hi] or a
    corrector failure terminate the branch with the reason recorded.
    """
    if axis == "nu_max":
        return _branch_nu_max(params, lo, hi, max_points)
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}")

    sp0 = _with_param(params, axis, lo)
    eqs = gspt.equilibrium_full(sp0)
    if not eqs:
        return BranchResult(axis=axis, points=(), termination="no equilibrium at start")
    c0 = c_seed if c_seed is not None else eqs[0].c
    pts = [_branch_point(axis, lo, c0, sp0)]
    # first predictor: walk the parameter directly
    scale_c = 0.05
    y_prev = np.array([c0 / scale_c, lo])
    # second point by natural continuation
    lam1 = lo + ds
    sp1 = _with_param(params, axis, lam1)
    try:
        c1 = brentq(_balance, max(1e-9, c0 * 0.5), min(sp1.c_t, c0 * 2.0),
                    args=(sp1,), xtol=1e-15)
    except ValueError:
        return BranchResult(axis=axis, points=tuple(pts),
                            termination="natural continuation failed at start")
    pts.append(_branch_point(axis, lam1, c1, sp1))
    y_cur = np.array([c1 / scale_c, lam1])

    termination = "max points reached"
    step = ds
    for _ in range(max_points):
        tangent = y_cur - y_prev
        norm = np.linalg.norm(tangent)
        if norm == 0.0:
            termination = "stalled tangent"
            break
        tangent = tangent / norm
        y_pred = y_cur + step * tangent

        def corrector(ypred):
            y = ypred.copy()
            for it in range(12):
                sp = _with_param(params, axis, y[1])
                F0 = _balance(y[0] * scale_c, sp)
                F1 = float(np.dot(y - ypred, tangent))
                if abs(F0) < NEWTON_TOL and abs(F1) < 1e-12:
                    return y, it + 1
                d0 = 1e-8 * (1.0 + abs(y[0]))
                d1 = 1e-8 * (1.0 + abs(y[1]))
                dF0_dc = (_balance((y[0] + d0) * scale_c, sp)
                          - _balance((y[0] - d0) * scale_c, sp)) / (2 * d0)
                sp_p = _with_param(params, axis, y[1] + d1)
                sp_m = _with_param(params, axis, y[1] - d1)
                dF0_dl = (_balance(y[0] * scale_c, sp_p)
                          - _balance(y[0] * scale_c, sp_m)) / (2 * d1)
                Jm = np.array([[dF0_dc, dF0_dl], list(tangent)])
                try:
                    delta = np.linalg.solve(Jm, [F0, F1])
                except np.linalg.LinAlgError:
                    return None, it + 1
                y = y - delta
                if not np.all(np.isfinite(y)) or y[0] <= 0:
                    return None, it + 1
            return None, 12

        sol, iters = corrector(y_pred)
        if sol is None:
            step *= 0.5
            if step < 1e-7:
                termination = "corrector failure"
                break
            continue
        if iters > 5:
            step = max(step * 0.5, 1e-7)
        elif iters < 3:
            step = min(step * 1.4, 4 * ds)
        y_prev, y_cur = y_cur, sol
        lam = float(sol[1])
        c_val = float(sol[0] * scale_c)
        if not (lo - 1e-9 <= lam <= hi + 1e-9):
            termination = "domain exit"
            break
        sp = _with_param(params, axis, lam)
        pts.append(_branch_point(axis, lam, c_val, sp))
    return BranchResult(axis=axis, points=tuple(pts), termination=termination)


def _rescaled_equilibrium(params: ScaledParams, delta: float) -> float:
    f = lambda C: model.rhs_regime2((model.h_inf_regime2(C, params), C),
                                    params, delta=delta)[1]
    return brentq(f, 0.7, 3.0, xtol=1e-14)


def _jacobian_rescaled(state, nu, params, delta, step=1e-7):
    J = np.zeros((2, 2))
    h, C = state
    for j, (dh, dC) in enumerate(((step, 0.0), (0.0, step))):
        fp = model.rhs_regime2_hopf((h + dh, C + dC), nu, params, delta)
        fm = model.rhs_regime2_hopf((h - dh, C - dC), nu, params, delta)
        J[:, j] = (fp - fm) / (2.0 * step)
    return J


def _branch_nu_max(params, lo, hi, n) -> BranchResult:
    """The rescaled system's equilibrium does not depend on nu_max, so the
    branch is a straight sweep with nu-dependent stability."""
    delta = params.delta
    Cs = _rescaled_equilibrium(params, delta)
    hs = model.h_inf_regime2(Cs, params)
    pts = []
    for nu in np.linspace(lo, hi, max(2, int(n))):
        J = _jacobian_rescaled((hs, Cs), nu, params, delta)
        tr, det = J[0, 0] + J[1, 1], J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        res = abs(model.rhs_regime2_hopf((hs, Cs), nu, params, delta)[1])
        pts.append(EquilibriumBranchPoint(axis="nu_max", param_value=float(nu),
                                          state=(hs, Cs), trace=tr, det=det,
                                          stability=_stability(tr, det),
                                          residual=res))
    return BranchResult(axis="nu_max", points=tuple(pts), termination="range covered")


# ---------------------------------------------------------------------------
# Hopf detection


@dataclass(frozen=True)
class HopfPoint:
    axis: str
    param_value: float
    state: tuple
    trace: float
    det: float
    transversal: bool
    criticality: str  # "supercritical" | "subcritical" | "unclassified"


def _trace_at(axis, lam, params, c_window, delta=None, state_hint=None):
    if axis == "nu_max":
        Cs = _rescaled_equilibrium(params, params.delta if delta is None else delta)
        hs = model.h_inf_regime2(Cs, params)
        J = _jacobian_rescaled((hs, Cs), lam, params,
                               params.delta if delta is None else delta)
        return J[0, 0] + J[1, 1], J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0], (hs, Cs)
    sp = _with_param(params, axis, lam)
    c = brentq(_balance, c_window[0], c_window[1], args=(sp,), xtol=1e-15)
    st = (_h_slaved(c, sp), c)
    J = _jacobian_full(st, sp)
    return J[0, 0] + J[1, 1], J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0], st


def _trace_det_state(axis, lam, c, params):
    sp = _with_param(params, axis, lam)
    st = (_h_slaved(c, sp), c)
    J = _jacobian_full(st, sp)
    return J[0, 0] + J[1, 1], J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0], st


def _branch_trace(axis, lam, c_seed, params):
    """Trace at the equilibrium continuing c_seed to the given parameter."""
    sp = _with_param(params, axis, lam)
    c = c_seed
    for _ in range(6):
        dc = 1e-7 * (1.0 + abs(c))
        f = _balance(c, sp)
        fp = (_balance(c + dc, sp) - _balance(c - dc, sp)) / (2 * dc)
        if fp == 0.0:
            break
        c -= f / fp
    return _trace_det_state(axis, lam, c, params)[0]


def _hopf_newton(axis, params, c0, lam0):
    """Newton on {calcium balance = 0, trace = 0} in (c, parameter).

    Tracks the local branch, so it stays reliable next to saddle-node folds
    where a parameter window holds several equilibria."""
    y = np.array([c0, lam0])
    for _ in range(30):
        sp = _with_param(params, axis, y[1])
        tr, det, st = _trace_det_state(axis, y[1], y[0], params)
        F = np.array([_balance(y[0], sp), tr])
        if abs(F[0]) < 1e-13 and abs(F[1]) < 5e-9:
            return float(y[1]), float(y[0]), tr, det, st
        Jm = np.zeros((2, 2))
        dc = 1e-7 * (1.0 + abs(y[0]))
        dl = 1e-7 * (1.0 + abs(y[1]))
        Jm[0, 0] = (_balance(y[0] + dc, sp) - _balance(y[0] - dc, sp)) / (2 * dc)
        Jm[1, 0] = (_trace_det_state(axis, y[1], y[0] + dc, params)[0]
                    - _trace_det_state(axis, y[1], y[0] - dc, params)[0]) / (2 * dc)
        sp_p = _with_param(params, axis, y[1] + dl)
        sp_m = _with_param(params, axis, y[1] - dl)
        Jm[0, 1] = (_balance(y[0], sp_p) - _balance(y[0], sp_m)) / (2 * dl)
        Jm[1, 1] = (_trace_det_state(axis, y[1] + dl, y[0], params)[0]
                    - _trace_det_state(axis, y[1] - dl, y[0], params)[0]) / (2 * dl)
        try:
            step = np.linalg.solve(Jm, F)
        except np.linalg.LinAlgError:
            return None
        y = y - step
        if not np.all(np.isfinite(y)) or y[0] <= 0:
            return None
    return None


def detect_hopf(branch: BranchResult, params: ScaledParams,
                delta: float | None = None) -> list[HopfPoint]:
    """Trace-zero points with positive determinant along a branch.

    Sign changes of the trace between consecutive branch points (with
    positive determinant on both sides) are refined well below the 1e-6
    parameter tolerance; empty list when none."""
    out = []
    pts = branch.points
    for a, b in zip(pts[:-1], pts[1:]):
        if a.det <= 0.0 or b.det <= 0.0:
            continue
        if a.trace == 0.0 or a.trace * b.trace > 0.0:
            continue
        lam_lo, lam_hi = a.param_value, b.param_value
        if lam_lo == lam_hi:
            continue
        if branch.axis == "nu_max":
            def tr(lam):
                return _trace_at("nu_max", lam, params, None, delta)[0]
            lo, hi = sorted((lam_lo, lam_hi))
            try:
                lam_star = brentq(tr, lo, hi, xtol=1e-6 * HOPF_PARAM_TOL)
            except ValueError:
                continue
            trace, det, st = _trace_at("nu_max", lam_star, params, None, delta)
            c_star = st[1]
        else:
            sol = _hopf_newton(branch.axis, params,
                               0.5 * (a.state[1] + b.state[1]),
                               0.5 * (lam_lo + lam_hi))
            if sol is None:
                continue
            lam_star, c_star, trace, det, st = sol
            span = abs(lam_hi - lam_lo)
            if abs(lam_star - 0.5 * (lam_lo + lam_hi)) > 2.0 * span:
                continue  # Newton wandered off this bracket
        if det <= 0.0:
            continue
        # transversality: trace derivative in the parameter along the branch
        d = 10 * HOPF_PARAM_TOL
        if branch.axis == "nu_max":
            slope = (tr(lam_star + d) - tr(lam_star - d)) / (2 * d)
        else:
            slope = (_branch_trace(branch.axis, lam_star + d, c_star, params)
                     - _branch_trace(branch.axis, lam_star - d, c_star, params)
                     ) / (2 * d)
        out.append(HopfPoint(axis=branch.axis, param_value=float(lam_star),
                             state=st, trace=float(trace), det=float(det),
                             transversal=bool(abs(slope) > 0.0),
                             criticality="unclassified"))
    return out


def estimate_criticality(params: ScaledParams, hopf: HopfPoint,
                         rel_offsets=(0.02, 0.08)) -> HopfPoint:
    """Classify a Hopf point by the amplitude growth past onset.

    On the side where the equilibrium destabilizes, a supercritical point
    carries small cycles with amplitude ~ sqrt(offset), so quadrupling the
    offset doubles the amplitude; a subcritical point jumps straight to the
    large relaxation branch, whose amplitude barely moves.  The ratio
    amp(small offset)/amp(large offset) separates the two.
    """
    d = 10 * HOPF_PARAM_TOL
    c_window = (hopf.state[1] * 0.2, hopf.state[1] * 5.0) if hopf.axis != "nu_max" else None
    tr = lambda lam: _trace_at(hopf.axis, lam, params, c_window)[0]
    slope = (tr(hopf.param_value + d) - tr(hopf.param_value - d)) / (2 * d)
    side = 1.0 if slope > 0 else -1.0  # direction in which the equilibrium destabilizes

    amps = []
    for rel in rel_offsets:
        lam = hopf.param_value * (1.0 + side * rel)
        y0 = (hopf.state[0] * 1.02 + 1e-4, hopf.state[1])
        if hopf.axis == "nu_max":
            field = model.make_rhs_regime2_hopf(params, lam)
            horizon = 8.0   # settling is O(1) on this timescale past onset
        else:
            sp = _with_param(params, hopf.axis, lam)
            field = model.make_rhs(sp)
            horizon = 2.0 / sp.eps**2
        cfg = IntegratorConfig(rel_tol=1e-8, abs_tol=1e-11)
        traj = integrate(field, y0, (0.0, horizon), cfg)
        tail = traj.t > 0.8 * traj.t[-1]
        amps.append(float(traj.y[tail, 1].max() - traj.y[tail, 1].min()))
    expect = math.sqrt(rel_offsets[0] / rel_offsets[-1])
    ratio = amps[0] / amps[-1] if amps[-1] > 0 else 1.0
    crit = "supercritical" if ratio < math.sqrt(expect) else "subcritical"
    return dc_replace(hopf, criticality=crit)


# ---------------------------------------------------------------------------
# Hopf value: displayed formula and numeric location


@dataclass(frozen=True)
class HopfFormulaReport:
    C_star: float
    value_printed: float
    value_derived: float
    condition_lhs: float        # |D_C h_inf(C*)|
    condition_rhs_printed: float
    condition_rhs_derived: float
    condition_ok: bool
    tau_tilde_printed: float
    tau_tilde_derived: float


def hopf_value_formula(params: ScaledParams, C_star: float | None = None) -> HopfFormulaReport:
    """Leading-order Hopf value of the rescaled gating-time parameter.

    Evaluates the displayed closed form (K_h^4 + C*^4) * C* /
    (2 A K_h^4 (C*^2 - 2 K gamma^2 c_t^2)) under both SERCA conventions,
    together with the determinant condition |D_C h_inf| > D_C f0 / D_h f0.
    C* defaults to the exact full-system equilibrium.
    """
    if C_star is None:
        eqs = gspt.equilibrium_full(params)
        C_star = max(s.c for s in eqs) / params.delta
    kh4 = params.hat_K_h**4
    dc = derived_constants(params)
    denom_core = C_star**2 - 2.0 * params.hat_K * params.gamma**2 * params.c_t**2
    vals = {}
    conds = {}
    for conv in ("printed", "derived"):
        A = dc.pick(conv)
        vals[conv] = (kh4 + C_star**4) * C_star / (2.0 * A * kh4 * denom_core)
        lam = gspt.lambda_S(C_star, params, conv)
        dhf0 = dc.A_IPR * params.gamma * params.c_t * C_star**4
        conds[conv] = lam / dhf0
    dhinf = abs(-4.0 * kh4 * C_star**3 / (kh4 + C_star**4) ** 2)
    e32 = params.eps ** -1.5
    return HopfFormulaReport(
        C_star=C_star,
        value_printed=vals["printed"],
        value_derived=vals["derived"],
        condition_lhs=dhinf,
        condition_rhs_printed=conds["printed"],
        condition_rhs_derived=conds["derived"],
        condition_ok=bool(C_star > gspt.fold_point(params).C_F
                          and dhinf > min(conds.values())),
        tau_tilde_printed=vals["printed"] * e32,
        tau_tilde_derived=vals["derived"] * e32,
    )


@dataclass(frozen=True)
class NumericHopf:
    nu_ah: float
    tau_tilde_ah: float
    state: tuple
    det: float
    delta: float


def numeric_hopf_nu_max(params: ScaledParams, delta: float | None = None,
                        bracket=(1e-4, 10.0)) -> NumericHopf:
    """Trace-zero of the exact rescaled system over nu_max, by bisection."""
    d = params.delta if delta is None else delta
    Cs = _rescaled_equilibrium(params, d)
    hs = model.h_inf_regime2(Cs, params)

    def tr(nu):
        J = _jacobian_rescaled((hs, Cs), nu, params, d)
        return J[0, 0] + J[1, 1]

    nu_ah = brentq(tr, *bracket, xtol=1e-14, rtol=8.9e-16)
    J = _jacobian_rescaled((hs, Cs), nu_ah, params, d)
    det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
    return NumericHopf(nu_ah=float(nu_ah), tau_tilde_ah=float(nu_ah * d**-3),
                       state=(hs, Cs), det=float(det), delta=d)


def numeric_hopf_taumax(params: ScaledParams, bracket=(1e-6, 10.0)) -> NumericHopf:
    """Trace-zero of the exact full system over hat_tau_max, by bisection.

    The equilibrium itself is independent of the gating time, so only the
    trace moves; reported as the equivalent dimensionless tau_tilde."""
    eqs = gspt.equilibrium_full(params)
    st = max(eqs, key=lambda s: s.c)

    def tr(tau):
        sp = dc_replace(params, hat_tau_max=tau)
        J = _jacobian_full(st, sp)
        return J[0, 0] + J[1, 1]

    tau_ah = brentq(tr, *bracket, xtol=1e-16, rtol=8.9e-16)
    sp = dc_replace(params, hat_tau_max=tau_ah)
    J = _jacobian_full(st, sp)
    det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
    return NumericHopf(nu_ah=float(tau_ah / params.delta),
                       tau_tilde_ah=float(tau_ah / params.eps**2),
                       state=tuple(st), det=float(det), delta=params.delta)


def analytic_trace_det_rescaled(params: ScaledParams, nu_max: float,
                                convention: str = "derived"):
    """Closed-form trace/determinant of the rescaled system at delta = 0.

    trace = -(1+C*^4)/nu + D_C f0;  det = -(1/tau_h)(D_C f0 + h_inf' D_h f0),
    with all pieces evaluated from the convention formulas at the delta = 0
    equilibrium (derived convention matches the exact field).
    """
    cub = gspt.equilibria_cubic(params, convention)
    C = max(cub.C_values)
    kh4 = params.hat_K_h**4
    dcst = derived_constants(params)
    lam = gspt.lambda_S(C, params, convention)
    dhf0 = dcst.A_IPR * params.gamma * params.c_t * C**4
    hinf_prime = -4.0 * kh4 * C**3 / (kh4 + C**4) ** 2
    inv_tau = (1.0 + C**4) / nu_max
    trace = -inv_tau + lam
    det = -inv_tau * (lam + hinf_prime * dhf0)
    return trace, det, C


# ---------------------------------------------------------------------------
# cusp map


@dataclass(frozen=True)
class CuspMap:
    p_values: np.ndarray
    ct_values: np.ndarray
    counts: np.ndarray          # shape (n_ct, n_p)
    boundary: tuple             # (p, c_t) midpoints of count transitions
    vertex: tuple               # (p, c_t) of the cusp point (P = P' = P'' = 0)
    vertex_m: float
    convention: str


def count_roots_brute(params: ScaledParams, convention: str = "printed",
                      m_max: float = 100.0, n: int = 1_000_000) -> int:
    """Sign-change count of the equilibrium cubic on (0, m_max]; the
    brute-force oracle for the companion-matrix root counts."""
    a3, a2, a1, a0 = gspt.cubic_coefficients(params, convention)
    m = np.linspace(m_max / n, m_max, n)
    P = ((a3 * m + a2) * m + a1) * m + a0
    s = np.sign(P)
    s[s == 0] = 1
    return int(np.count_nonzero(np.diff(s)))


def cusp_scan(params: ScaledParams, p_range=(0.005, 0.05), ct_range=(0.3, 1.4),
              grid: int = 60, convention: str = "printed") -> CuspMap:
    """Positive-root counts of the equilibrium cubic over a (p, c_t) grid,
    with the codimension-two cusp vertex refined from P = P' = P'' = 0."""
    ps = np.linspace(*p_range, grid)
    cts = np.linspace(*ct_range, grid)
    counts = np.zeros((grid, grid), dtype=int)
    for i, ct in enumerate(cts):
        for j, pv in enumerate(ps):
            sp = dc_replace(params, p=pv, c_t=ct)
            counts[i, j] = len(gspt.equilibria_cubic(sp, convention).roots_m)
    boundary = []
    for i in range(grid):
        for j in range(grid - 1):
            if counts[i, j] != counts[i, j + 1]:
                boundary.append((0.5 * (ps[j] + ps[j + 1]), cts[i]))
    for i in range(grid - 1):
        for j in range(grid):
            if counts[i, j] != counts[i + 1, j]:
                boundary.append((ps[j], 0.5 * (cts[i] + cts[i + 1])))

    def cusp_eqs(x):
        m, pv, ct = x
        sp = dc_replace(params, p=abs(pv), c_t=abs(ct))
        a3, a2, a1, a0 = gspt.cubic_coefficients(sp, convention)
        return [((a3 * m + a2) * m + a1) * m + a0,
                (3 * a3 * m + 2 * a2) * m + a1,
                6 * a3 * m + 2 * a2]

    # seed from the three-root region if present, else from mid-grid
    mask = counts == 3
    if mask.any():
        ii, jj = np.where(mask)
        seed_p, seed_ct = float(ps[jj].min()), float(cts[ii].max())
    else:
        seed_p, seed_ct = float(np.mean(p_range)), float(np.mean(ct_range))
    sol, info, ok, _ = fsolve(cusp_eqs, [0.35, seed_p, seed_ct], full_output=True)
    vertex = (abs(float(sol[1])), abs(float(sol[2]))) if ok == 1 else (math.nan, math.nan)
    return CuspMap(p_values=ps, ct_values=cts, counts=counts,
                   boundary=tuple(boundary), vertex=vertex,
                   vertex_m=float(sol[0]) if ok == 1 else math.nan,
                   convention=convention)


# ---------------------------------------------------------------------------
# onset scans


@dataclass(frozen=True)
class OnsetRow:
    param_value: float
    c_min: float
    c_max: float
    amplitude: float
    oscillating: bool


@dataclass(frozen=True)
class OnsetScan:
    axis: str
    rows: tuple
    jump_bracket: tuple     # (lo, hi) bracketing the amplitude jump, or None
    resolution: float


def _attractor_amplitude(sp: ScaledParams, horizon_factor: float = 3.0):
    field = model.make_rhs(sp)
    cfg = IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10)
    horizon = horizon_factor / sp.eps**2
    traj = integrate(field, (0.5, 0.5), (0.0, horizon), cfg)
    tail = traj.t > 0.55 * traj.t[-1]
    c = traj.y[tail, 1]
    return float(c.min()), float(c.max())


def onset_scan_ct(params: ScaledParams, p: float, ct_range=(0.9, 1.05),
                  n: int = 16, resolution: float = 1e-3,
                  amp_threshold: float = 0.05) -> OnsetScan:
    """Amplitude table over c_t at fixed p, with the near-vertical onset
    bracketed to the requested resolution (the exponentially small canard
    interval itself is not resolved)."""
    rows = []
    for ct in np.linspace(*ct_range, n):
        sp = dc_replace(params, p=p, c_t=ct)
        lo, hi = _attractor_amplitude(sp)
        rows.append(OnsetRow(param_value=float(ct), c_min=lo, c_max=hi,
                             amplitude=hi - lo, oscillating=hi - lo > amp_threshold))
    bracket = None
    for a, b in zip(rows[:-1], rows[1:]):
        if a.oscillating != b.oscillating:
            lo, hi = a.param_value, b.param_value
            osc_lo = a.oscillating
            while hi - lo > resolution:
                mid = 0.5 * (lo + hi)
                sp = dc_replace(params, p=p, c_t=mid)
                cmin, cmax = _attractor_amplitude(sp)
                if ((cmax - cmin) > amp_threshold) == osc_lo:
                    lo = mid
                else:
                    hi = mid
            bracket = (lo, hi)
            break
    return OnsetScan(axis="c_t", rows=tuple(rows), jump_bracket=bracket,
                     resolution=resolution)


# ---------------------------------------------------------------------------
# period vs gating-time scan


@dataclass(frozen=True)
class TauScanRow:
    tau_tilde: float
    oscillating: bool
    period: float
    c_min: float
    c_max: float
    note: str


@dataclass(frozen=True)
class TauScan:
    rows: tuple
    ah_located: NumericHopf
    slope_onset: float       # log-log period slope near onset (expected ~1/2)
    slope_relaxation: float  # expected ~1 (period linear in tau)
    r2_relaxation: float


def taumax_period_scan(params: ScaledParams, taumax_list) -> TauScan:
    """Oscillation period as a function of the dimensionless gating time.

    Points below the Andronov-Hopf value record as non-oscillating; the
    square-root law is fitted over the near-onset decade and the linear law
    over the relaxation decade.
    """
    ah = numeric_hopf_taumax(params)
    rows = []
    for taut in sorted(taumax_list):
        sp = dc_replace(params, hat_tau_max=taut * params.eps**2)
        try:
            cyc = cycles.find_limit_cycle(sp, with_floquet=False)
            lo, hi = cyc.c_range
            rows.append(TauScanRow(tau_tilde=float(taut), oscillating=True,
                                   period=cyc.period, c_min=lo, c_max=hi, note=""))
        except cycles.NoCycleError as exc:
            rows.append(TauScanRow(tau_tilde=float(taut), oscillating=False,
                                   period=math.nan, c_min=math.nan,
                                   c_max=math.nan, note=str(exc)))
    osc = [r for r in rows if r.oscillating]
    slope_onset = math.nan
    near = [r for r in osc if r.tau_tilde <= 8.0 * ah.tau_tilde_ah]
    if len(near) >= 2:
        slope_onset = float(np.polyfit(np.log([r.tau_tilde for r in near]),
                                       np.log([r.period for r in near]), 1)[0])
    slope_relax, r2 = math.nan, math.nan
    relax = [r for r in osc if r.tau_tilde >= 0.05 / params.eps**2]
    if len(relax) >= 3:
        x = np.array([r.tau_tilde for r in relax])
        y = np.array([r.period for r in relax])
        coef = np.polyfit(x, y, 1)
        yfit = np.polyval(coef, x)
        ss_res = float(np.sum((y - yfit) ** 2))
        ss_tot = float(np.sum((y - y.mean()) ** 2))
        slope_relax = float(coef[0])
        r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else math.nan
    return TauScan(rows=tuple(rows), ah_located=ah, slope_onset=slope_onset,
                   slope_relaxation=slope_relax, r2_relaxation=r2)
