"""Relaxation-cycle machinery: return-map fixed points, Floquet exponents,
the singular (concatenated) cycle, and convergence diagnostics.

The attracting cycle is found as a fixed point of the numerical return map
on a calcium section crossed downward; the transverse contraction is so
strong (log-multiplier of order -1/sqrt(eps) and below) that a couple of
returns converge to well under the 1e-8 locating tolerance.  The Floquet
exponent is computed as the cycle average of the field divergence, because
the monodromy multiplier itself underflows at realistic eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace as dc_replace

import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.spatial import cKDTree

from . import blowup, gspt, model
from .integrate import (IntegratorConfig, NoCrossingError, Section,
                        integrate, integrate_to_section)
from .params import ScaledParams, a_serca, derived_constants

__all__ = [
    "LimitCycle",
    "SingularCycle",
    "ConvergenceReport",
    "PeriodEstimate",
    "NoCycleError",
    "find_limit_cycle",
    "floquet_exponent",
    "divergence_quadrature",
    "singular_cycle",
    "hausdorff_distance",
    "resample_arclength",
    "eps_convergence_sweep",
    "period_estimate",
]

FIXED_POINT_TOL = 1e-8


class NoCycleError(RuntimeError):
    """Return-map iteration failed to converge to a periodic orbit."""

    def __init__(self, message, iterates=()):
        super().__init__(message)
        self.iterates = list(iterates)


@dataclass(frozen=True)
class LimitCycle:
    """Sampled closed orbit with period and transverse Floquet exponent."""

    t: np.ndarray          # sample times in [0, period]
    states: np.ndarray     # (n, 2) samples, first ~ last (closure gap below)
    period: float
    floquet: float         # (1/T) * integral of div f along the cycle, < 0
    eps: float
    section_value: float
    closure_gap: float

    @property
    def c_range(self):
        return float(self.states[:, 1].min()), float(self.states[:, 1].max())

    @property
    def h_range(self):
        return float(self.states[:, 0].min()), float(self.states[:, 0].max())


def _default_config(eps):
    return IntegratorConfig(rel_tol=1e-9, abs_tol=1e-11, method="implicit")


def _period_hint(params, eps) -> float:
    """Cheap leading-order guess of the cycle period used to size horizons.

    Outside the relaxation regime the crawl integral can misbehave (the
    integrand changes sign when an equilibrium sits on the attracting
    branch); anything non-finite or out of scale falls back to the bare
    infra-slow order of magnitude.
    """
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            sp = params if eps == params.eps else params.with_eps(eps)
            est = period_estimate(sp, "derived")
        if math.isfinite(est.refined) and 0 < est.refined <= 10.0 / eps**2:
            return est.refined
    except Exception:
        pass
    return 0.3 / eps**2


def _attractor_probe(params, eps, y0, config):
    """Coarse run onto the attractor; returns (end state, c_lo, c_hi)."""
    hint = _period_hint(params, eps)
    horizon = 0.35 / eps**2 + 4.5 * hint
    probe_cfg = dc_replace(config, rel_tol=max(config.rel_tol, 1e-8),
                           abs_tol=max(config.abs_tol, 1e-10))
    field = model.make_rhs(params, eps)
    traj = integrate(field, y0, (0.0, horizon), probe_cfg)
    if traj.reason != "time":
        raise NoCycleError(f"attractor probe failed: {traj.message}")
    window = min(0.6 * horizon, max(2.2 * hint, 0.05 / eps**2))
    tail = traj.t > traj.t[-1] - window
    c_tail = traj.y[tail, 1]
    return traj.y[-1], float(c_tail.min()), float(c_tail.max())


def _sample_between(trajectory, t_lo, t_hi, per_step=6):
    """Orbit samples between two times, following the adaptive steps (the
    solver concentrates steps in the spike, uniform grids would miss it)."""
    mask = (trajectory.t > t_lo) & (trajectory.t < t_hi)
    knots = np.concatenate([[t_lo], trajectory.t[mask], [t_hi]])
    ts = []
    for a, b in zip(knots[:-1], knots[1:]):
        ts.extend(np.linspace(a, b, per_step, endpoint=False))
    ts.append(t_hi)
    ts = np.asarray(ts)
    return ts, trajectory(ts)


def find_limit_cycle(params: ScaledParams, eps: float | None = None,
                     config: IntegratorConfig | None = None,
                     section_value: float | None = None,
                     y0=(0.5, 0.5), transient_returns: int = 3,
                     max_returns: int = 12,
                     with_floquet: bool = True) -> LimitCycle:
    """Locate the attracting relaxation cycle at the given eps.

    Returns a sampled closed orbit; raises :class:`NoCycleError` (with the
    last iterates attached) when the attractor is a point or the return map
    does not settle.
    """
    e = params.eps if eps is None else eps
    cfg = config or _default_config(e)
    y_on, c_lo, c_hi = _attractor_probe(params, e, np.asarray(y0, float), cfg)
    if c_hi - c_lo < 1e-4:
        raise NoCycleError(
            f"attractor at eps={e} is a point (c collapsed to ~{c_hi:.4f})",
            iterates=[y_on])
    sec_c = 0.5 * (c_lo + c_hi) if section_value is None else section_value
    section = Section(normal=(0.0, 1.0), offset=sec_c, direction=-1)
    field = model.make_rhs(params, e)
    horizon = 0.5 / e**2 + 6.0 * _period_hint(params, e)

    iterates = []
    y_cur = y_on
    t_return = None
    for k in range(max_returns):
        try:
            ev = integrate_to_section(field, y_cur, section, cfg,
                                      t_max=horizon, min_time=1e-9)
        except NoCrossingError as exc:
            raise NoCycleError(f"return map lost the section: {exc}",
                               iterates=iterates or [y_cur]) from exc
        iterates.append(ev.y)
        disp = abs(ev.y[0] - y_cur[0]) if k > 0 else math.inf
        y_cur = ev.y
        t_return = ev.t
        if k + 1 >= transient_returns and disp < FIXED_POINT_TOL:
            break
    else:
        raise NoCycleError(
            f"return map did not converge below {FIXED_POINT_TOL} in "
            f"{max_returns} returns", iterates=iterates)

    # one more full return from the fixed point records the orbit
    ev = integrate_to_section(field, y_cur, section, cfg, t_max=horizon,
                              min_time=1e-9)
    period = ev.t
    ts, ys = _sample_between(ev.trajectory, 0.0, period)
    closure = float(np.linalg.norm(ev.y - y_cur))
    lam = math.nan
    cycle = LimitCycle(t=ts, states=ys, period=period, floquet=lam, eps=e,
                       section_value=sec_c, closure_gap=closure)
    if with_floquet:
        lam = floquet_exponent(cycle, params, e, config=cfg)
        cycle = dc_replace(cycle, floquet=lam)
    return cycle


def divergence_quadrature(field_with_div, y0, period: float,
                          config: IntegratorConfig) -> float:
    """(1/T) * closed-path integral of div f, carried as an auxiliary state
    so the same error control resolves the stiff spike.  field_with_div must
    map (t, (y..., q)) to (f(y)..., div f(y))."""
    z0 = np.concatenate([np.asarray(y0, float), [0.0]])
    traj = integrate(field_with_div, z0, (0.0, period), config)
    if traj.reason != "time":
        raise NoCycleError(f"divergence quadrature failed: {traj.message}")
    return float(traj.y[-1, -1] / period)


def floquet_exponent(cycle: LimitCycle, params: ScaledParams,
                     eps: float | None = None,
                     config: IntegratorConfig | None = None) -> float:
    """Transverse Floquet exponent of the planar cycle.

    For a planar cycle the nontrivial monodromy exponent equals the cycle
    average of the field divergence; the multiplier itself underflows at
    realistic eps, the exponent stays representable.
    """
    e = cycle.eps if eps is None else eps
    cfg = config or _default_config(e)
    field = model.make_rhs_with_div(params, e)
    return divergence_quadrature(field, cycle.states[0], cycle.period, cfg)


# ---------------------------------------------------------------------------
# singular cycle


@dataclass(frozen=True)
class SingularCycle:
    """Concatenated singular orbit in entry-chart coordinates (h, r1, eps1).

    Segments: fiber (layer heteroclinic), drain (on S_c), axis (cylinder
    axis), crawl (on the equilibrium curve of the cylinder), drop (fast fiber
    on the cylinder at the fold height).  ``blowdown`` carries the (h, c)
    polyline used for Hausdorff comparisons.
    """

    segments: dict
    q_points: dict
    c_d: float
    h_F: float
    eps_f1: float
    eps_l1: float
    convention: str
    blowdown: np.ndarray

    def concatenation_gaps(self) -> dict:
        order = ["drop", "fiber", "drain", "axis", "crawl"]
        names = ["Q1", "Q2", "Q3", "Q4", "Q5"]
        gaps = {}
        for i, name in enumerate(names):
            a = self.segments[order[i]][-1]
            b = self.segments[order[(i + 1) % len(order)]][0]
            gaps[name] = float(np.linalg.norm(np.asarray(a) - np.asarray(b)))
        return gaps


def singular_cycle(params: ScaledParams, convention: str = "printed",
                   n: int = 1200) -> SingularCycle:
    """Assemble the singular relaxation cycle for the given convention.

    The attracting cycle of the flow tracks the "derived" geometry (that
    convention's crawl curve is the exact equilibrium curve of the cylinder
    dynamics); the "printed" variant reproduces the published coordinates.
    """
    fold = gspt.fold_point(params, convention)
    h_F = fold.h_F
    het = gspt.layer_heteroclinic(params, h_F, n_samples=n)
    kg2ct2 = params.hat_K * params.gamma**2 * params.c_t**2
    eps_l1 = 1.0 / kg2ct2
    eps_f1 = 0.5 / kg2ct2

    e1_axis = np.linspace(0.0, eps_l1, n)
    e1_crawl = np.linspace(eps_l1, eps_f1, n)
    e1_drop = np.linspace(eps_f1, 0.0, n)
    zeros = np.zeros(n)
    segments = {
        "fiber": np.column_stack([het.h, het.c, zeros]),
        "drain": np.column_stack([zeros, np.linspace(het.c_d, 0.0, n), zeros]),
        "axis": np.column_stack([zeros, zeros, e1_axis]),
        "crawl": np.column_stack([
            blowup.psi_curve(e1_crawl, params, convention), zeros, e1_crawl]),
        "drop": np.column_stack([np.full(n, h_F), zeros, e1_drop]),
    }
    q_points = {
        "Q1": (h_F, 0.0, 0.0),
        "Q2": (0.0, het.c_d, 0.0),
        "Q3": (0.0, 0.0, 0.0),
        "Q4": (0.0, 0.0, eps_l1),
        "Q5": (h_F, 0.0, eps_f1),
    }
    blowdown = np.vstack([
        np.column_stack([het.h, het.c]),
        np.column_stack([zeros, np.linspace(het.c_d, 0.0, n)]),
        np.column_stack([np.linspace(0.0, h_F, n), zeros]),
    ])
    return SingularCycle(segments=segments, q_points=q_points, c_d=het.c_d,
                         h_F=h_F, eps_f1=eps_f1, eps_l1=eps_l1,
                         convention=convention, blowdown=blowdown)


# ---------------------------------------------------------------------------
# Hausdorff distance


def resample_arclength(points: np.ndarray, n: int = 2048) -> np.ndarray:
    """Uniform-in-arclength resampling; decouples the metric from the
    integrator's step distribution."""
    pts = np.asarray(points, dtype=float)
    d = np.sqrt(((np.diff(pts, axis=0)) ** 2).sum(axis=1))
    keep = np.concatenate([[True], d > 0])
    pts = pts[keep]
    d = np.sqrt(((np.diff(pts, axis=0)) ** 2).sum(axis=1))
    s = np.concatenate([[0.0], np.cumsum(d)])
    si = np.linspace(0.0, s[-1], n)
    return np.column_stack([np.interp(si, s, pts[:, 0]), np.interp(si, s, pts[:, 1])])


def _as_points(obj) -> np.ndarray:
    if isinstance(obj, LimitCycle):
        return obj.states
    if isinstance(obj, SingularCycle):
        return obj.blowdown
    return np.asarray(obj, dtype=float)


def _directed_polyline_distance(pts: np.ndarray, poly: np.ndarray) -> float:
    """max over pts of the distance to the polyline (point-to-segment).

    Candidate segments come from the two nearest polyline vertices of each
    point (KD-tree), which is exact for densely sampled smooth curves and
    keeps the cost near-linear.
    """
    a = poly[:-1]
    seg = poly[1:] - a
    seg_len2 = (seg**2).sum(axis=1)
    seg_len2[seg_len2 == 0.0] = 1.0
    _, idx = cKDTree(poly).query(pts, k=2)
    n_seg = len(a)
    best = np.full(len(pts), np.inf)
    for col in (idx[:, 0] - 1, idx[:, 0], idx[:, 1] - 1, idx[:, 1]):
        j = np.clip(col, 0, n_seg - 1)
        diff = pts - a[j]
        t = np.clip((diff * seg[j]).sum(1) / seg_len2[j], 0.0, 1.0)
        closest = diff - t[:, None] * seg[j]
        best = np.minimum(best, (closest**2).sum(1))
    return float(np.sqrt(best.max()))


def hausdorff_distance(a, b, n: int = 2048, refine_rel: float = 0.01) -> float:
    """Symmetric max-min Euclidean distance between two sampled curves in the
    (h, c) plane.

    Points of each curve are measured against the other's piecewise-linear
    interpolant (arclength-resampled), and the resampling is refined until
    the value is stable to 1%."""
    pa, pb = _as_points(a), _as_points(b)
    prev = None
    while True:
        ra, rb = resample_arclength(pa, n), resample_arclength(pb, n)
        d = max(_directed_polyline_distance(ra, rb),
                _directed_polyline_distance(rb, ra))
        if d < 1e-10 or (prev is not None and abs(d - prev) <= refine_rel * d):
            return float(d)
        if n >= 16384:
            return float(d)
        prev, n = d, 2 * n


# ---------------------------------------------------------------------------
# eps-convergence sweep


@dataclass(frozen=True)
class ConvergenceRow:
    eps: float
    ok: bool
    hausdorff: float
    floquet: float
    period: float
    note: str


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple
    slope: float            # log-log fit of distance vs eps over survivors
    survivors: int
    survivors_ok: bool      # >= 4 required for the fit to count
    monotone: bool
    floquet_negative: bool
    floquet_eps2_ratio: float  # max/min of |floquet|*eps^2 over survivors
    convention: str


def eps_convergence_sweep(params: ScaledParams, eps_list,
                          config: IntegratorConfig | None = None,
                          convention: str = "derived") -> ConvergenceReport:
    """Hausdorff distance of the cycle to the singular cycle across eps.

    Per-eps failures (no oscillation) are recorded and the fit runs over the
    survivors; at least four survivors are required for a valid exponent.
    The singular cycle defaults to the "derived" geometry, the one the flow
    actually selects.
    """
    gamma0 = singular_cycle(params, convention)
    rows = []
    for e in sorted(eps_list):
        try:
            cyc = find_limit_cycle(params, eps=e, config=config)
            dist = hausdorff_distance(cyc, gamma0)
            rows.append(ConvergenceRow(eps=e, ok=True, hausdorff=dist,
                                       floquet=cyc.floquet, period=cyc.period,
                                       note=""))
        except NoCycleError as exc:
            rows.append(ConvergenceRow(eps=e, ok=False, hausdorff=math.nan,
                                       floquet=math.nan, period=math.nan,
                                       note=str(exc)))
    good = [r for r in rows if r.ok]
    slope = math.nan
    if len(good) >= 2:
        xs = np.log([r.eps for r in good])
        ys = np.log([r.hausdorff for r in good])
        slope = float(np.polyfit(xs, ys, 1)[0])
    dists = [r.hausdorff for r in good]
    monotone = all(d1 < d2 for d1, d2 in zip(dists[:-1], dists[1:]))
    fl2 = [abs(r.floquet) * r.eps**2 for r in good]
    ratio = max(fl2) / min(fl2) if fl2 else math.nan
    return ConvergenceReport(rows=tuple(rows), slope=slope, survivors=len(good),
                             survivors_ok=len(good) >= 4, monotone=monotone,
                             floquet_negative=all(r.floquet < 0 for r in good),
                             floquet_eps2_ratio=ratio, convention=convention)


# ---------------------------------------------------------------------------
# leading-order period law


@dataclass(frozen=True)
class PeriodEstimate:
    eps: float
    hat_tau_max: float
    order_estimate: float   # hat_tau_max / eps^2 (crawl-time order of magnitude)
    v: float                # dimensionless crawl integral, independent of tau
    refined: float          # order_estimate * v
    quad_error: float
    C_start: float
    C_fold: float
    convention: str


def period_estimate(params: ScaledParams, convention: str = "printed",
                    fold_window: float = 0.1) -> PeriodEstimate:
    """Leading-order period of the relaxation cycle on the fast timescale.

    The dominant contribution is the crawl along the attracting cylinder
    branch; its duration is the integral of 1/C' over the crawl window,
    which is linear in hat_tau_max.  The integrand vanishes like (C_F - C)
    at the fold; a square-root substitution keeps the quadrature clean there
    and the estimated truncation error is reported.
    """
    dc = derived_constants(params)
    A = dc.pick(convention)
    g, ct = params.gamma, params.c_t
    C0 = math.sqrt(params.hat_K) * g * ct
    CF = math.sqrt(2.0 * params.hat_K) * g * ct

    def inv_Cdot_over_tau(C):
        # (1/C') / hat_tau_max of the reduced crawl flow; tau-free by design
        lam = gspt.lambda_S(C, params, convention)
        gt_over_tau = -(1.0 + C**4) * (
            gspt.zeta(C, params, convention) - model.h_inf_regime2(C, params))
        dC = -gt_over_tau * dc.A_IPR * g * ct * C**4 / lam
        return 1.0 / dC

    split = CF - fold_window * (CF - C0)
    v1, e1 = quad(inv_Cdot_over_tau, C0, split, limit=200)
    w = math.sqrt(CF - split)
    v2, e2 = quad(lambda u: inv_Cdot_over_tau(CF - u * u) * 2.0 * u, 0.0, w,
                  limit=200)
    v = v1 + v2
    order = params.hat_tau_max / params.eps**2
    return PeriodEstimate(eps=params.eps, hat_tau_max=params.hat_tau_max,
                          order_estimate=order, v=v, refined=order * v,
                          quad_error=e1 + e2, C_start=C0, C_fold=CF,
                          convention=convention)
