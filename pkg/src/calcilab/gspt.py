"""Slow-fast decomposition and critical-manifold analysis of the scaled model.

The layer/reduced objects live on two charts:

* the original (h, c) plane, with critical lines S_c = {h = 0} (attracting
  for c > 0) and S_h = {c = 0} (everywhere degenerate), and
* the rescaled small-calcium chart (h, C = c/sqrt(eps)), whose folded
  critical curve is the graph of ``zeta``.

Every formula that contains the lumped SERCA prefactor accepts a convention
flag (see :mod:`calcilab.params`): "printed" evaluates the published
constant, "derived" the substitution-consistent one.  With the "derived"
flag the zeta graph and the leading-order rescaled field coincide with the
exact delta -> 0 limit of :func:`calcilab.model.rhs_regime2`; the "printed"
flag reproduces the published worked numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from . import model
from .params import ScaledParams, a_serca, derived_constants

__all__ = [
    "Decomposition",
    "CriticalManifoldPoint",
    "FoldPoint",
    "CubicRoots",
    "AssumptionOneReport",
    "HeteroclinicOrbit",
    "NonHyperbolicError",
    "HeteroclinicError",
    "decompose",
    "nontrivial_eigenvalue",
    "manifold_point",
    "reduced_field",
    "zeta",
    "lambda_S",
    "g_tilde",
    "f0_leading",
    "f0_quadratic_total",
    "f_rem_leading",
    "fold_point",
    "cubic_coefficients",
    "equilibria_cubic",
    "assumption_bounds",
    "check_assumption_one",
    "equilibrium_full",
    "layer_heteroclinic",
]

# |eigenvalue| below this times the local field scale counts as degenerate.
HYPERBOLICITY_TOL = 1e-8


class NonHyperbolicError(ValueError):
    """Reduced flow requested on a non normally hyperbolic point."""


class HeteroclinicError(RuntimeError):
    """Layer-fiber integration left the physical region."""


# ---------------------------------------------------------------------------
# slow-fast decomposition rhs = N*f + eps*G


@dataclass(frozen=True)
class Decomposition:
    """Factorized field: N (fast direction), f (scalar factor, = c^4 h) and
    the exact perturbation G with rhs = N*f + eps*G pointwise."""

    N: Callable
    f: Callable
    G: Callable

    def rhs(self, state, eps: float) -> np.ndarray:
        return self.N(state) * self.f(state) + eps * self.G(state, eps)


def _jipr_factor(h: float, c: float, sp: ScaledParams) -> float:
    """g_c / (c^4 h): the leading IPR factor, smooth on h, c >= 0."""
    p2 = sp.p**2
    den = (1.0 + sp.k_beta) * p2 * c**4 * h + sp.k_beta * sp.K_p**2 * (sp.K_c**4 + c**4)
    return sp.k_IPR * p2 * (sp.gamma * sp.c_t - (1.0 + sp.gamma) * c) / den


def decompose(params: ScaledParams) -> Decomposition:
    def N(state):
        h, c = state
        return np.array([-1.0 / params.hat_tau_max, _jipr_factor(h, c, params)])

    def f(state):
        h, c = state
        return c**4 * h

    def G(state, eps):
        g, W1, W2 = model.rhs_expansion(state, params)
        if eps == 0.0:
            return W1
        full = model.rhs_full(state, params, eps)
        remainder = (full - (g + eps * W1 + eps**2 * W2)) / eps**4
        return W1 + eps * W2 + eps**3 * remainder

    return Decomposition(N=N, f=f, G=G)


# ---------------------------------------------------------------------------
# critical manifolds and eigenvalues

BRANCHES = ("S_c", "S_h", "S_a", "S_r")


@dataclass(frozen=True)
class CriticalManifoldPoint:
    """Point on a critical-manifold branch with its transverse eigenvalue."""

    branch: str
    location: tuple
    eigenvalue: float
    degenerate: bool


def zeta(C: float, params: ScaledParams, convention: str = "printed") -> float:
    """Graph of the rescaled critical curve: h = zeta(C)."""
    dc = derived_constants(params)
    A = dc.pick(convention)
    return (A / (dc.A_IPR * params.gamma * params.c_t * C**4)) * (
        C**2 - params.gamma**2 * params.c_t**2 * params.hat_K)


def lambda_S(C: float, params: ScaledParams, convention: str = "printed") -> float:
    """Transverse eigenvalue along the rescaled critical curve."""
    A = a_serca(params, convention)
    return (2.0 * A / C) * (C**2 - 2.0 * params.hat_K * params.gamma**2 * params.c_t**2)


def g_tilde(h: float, C: float, params: ScaledParams) -> float:
    """Rescaled gating drift (the order-delta h-component)."""
    return -(1.0 + C**4) / params.hat_tau_max * (h - model.h_inf_regime2(C, params))


def f0_leading(h: float, C: float, params: ScaledParams,
               convention: str = "printed") -> float:
    """Leading-order rescaled calcium field whose zero set is the zeta graph.

    Under the "derived" convention this equals the exact delta -> 0 limit of
    the rescaled system.
    """
    dc = derived_constants(params)
    A = dc.pick(convention)
    return dc.A_IPR * params.gamma * params.c_t * C**4 * h - A * (
        C**2 - params.gamma**2 * params.c_t**2 * params.hat_K)


def f0_quadratic_total(h: float, C: float, params: ScaledParams,
                       convention: str = "printed") -> float:
    """Variant of the leading-order field with the (C^2 - c_t^2) quadratic
    factor; kept only for formula-level cross-checks, it is inconsistent with
    the zeta graph under either convention."""
    dc = derived_constants(params)
    A = dc.pick(convention)
    return dc.A_IPR * params.gamma * params.c_t * C**4 * h - A * (C**2 - params.c_t**2)


def f_rem_leading(h: float, C: float, params: ScaledParams,
                  convention: str = "printed") -> float:
    """First-order (in delta) correction to the rescaled calcium field.

    The substitution-consistent value of the lumped constant here is the
    "printed" one, which is therefore the default.
    """
    dc = derived_constants(params)
    A = dc.pick(convention)
    return -(dc.A_IPR * (1.0 + params.gamma) * C**4 * h + 2.0 * A * params.c_t) * C


def nontrivial_eigenvalue(point: CriticalManifoldPoint | tuple, params: ScaledParams,
                          convention: str = "printed") -> float:
    """Transverse (Lie-derivative) eigenvalue <grad f, N> at a manifold point."""
    branch, location = ((point.branch, point.location)
                        if isinstance(point, CriticalManifoldPoint) else point)
    if branch == "S_c":
        c = location[1]
        return -(c**4) / params.hat_tau_max
    if branch == "S_h":
        return 0.0
    if branch in ("S_a", "S_r"):
        C = location[1]
        return lambda_S(C, params, convention)
    raise ValueError(f"unknown branch {branch!r}")


def manifold_point(branch: str, coord: float, params: ScaledParams,
                   convention: str = "printed") -> CriticalManifoldPoint:
    """Build a manifold point from its free coordinate (c on S_c, h on S_h,
    C on the rescaled branches)."""
    if branch == "S_c":
        loc = (0.0, coord)
    elif branch == "S_h":
        loc = (coord, 0.0)
    elif branch in ("S_a", "S_r"):
        loc = (zeta(coord, params, convention), coord)
    else:
        raise ValueError(f"unknown branch {branch!r}")
    lam = nontrivial_eigenvalue((branch, loc), params, convention)
    degenerate = branch == "S_h" or abs(lam) < HYPERBOLICITY_TOL
    return CriticalManifoldPoint(branch=branch, location=loc, eigenvalue=lam,
                                 degenerate=degenerate)


def reduced_field(point: CriticalManifoldPoint, params: ScaledParams,
                  convention: str = "printed") -> np.ndarray:
    """Leading-order slow flow on a normally hyperbolic branch.

    On S_c the projection leaves (0, -J+_SERCA(c)); the origin is kept as the
    continuous extension (non-hyperbolic limit point of the branch).  On the
    rescaled curve the flow follows the projected gating drift and blows up
    in finite time at the fold, so points within the hyperbolicity tolerance
    of the fold are rejected, as is the everywhere-degenerate S_h.
    """
    if point.branch == "S_h":
        raise NonHyperbolicError("no reduced problem on the degenerate branch S_h")
    if point.branch == "S_c":
        c = point.location[1]
        den = params.K_s**2 + c**2
        return np.array([0.0, -params.hat_V_s * c**2 / den])
    C = point.location[1]
    lam = lambda_S(C, params, convention)
    scale = 2.0 * a_serca(params, convention) * max(C, 1.0)
    if abs(lam) < HYPERBOLICITY_TOL * scale:
        raise NonHyperbolicError(f"fold point is non-hyperbolic (lambda = {lam:.3e})")
    dc = derived_constants(params)
    gt = g_tilde(zeta(C, params, convention), C, params)
    dCdt = -dc.A_IPR * params.gamma * params.c_t * C**4 / lam * gt
    return np.array([gt, dCdt])


# ---------------------------------------------------------------------------
# fold point


@dataclass(frozen=True)
class FoldPoint:
    h_F: float
    C_F: float
    nondegeneracy: tuple  # (D_C^2 f0, D_h f0) at the fold, both positive
    regularity: tuple     # (g_tilde, d/dC g_tilde along the curve) at the fold
    convention: str


def fold_point(params: ScaledParams, convention: str = "printed") -> FoldPoint:
    dc = derived_constants(params)
    A = dc.pick(convention)
    g, ct = params.gamma, params.c_t
    C_F = math.sqrt(2.0 * params.hat_K) * g * ct
    h_F = A / (4.0 * params.hat_K * dc.A_IPR * g**3 * ct**3)
    nondeg = (4.0 * A, 4.0 * dc.A_IPR * params.hat_K**2 * g**5 * ct**5)
    gF = g_tilde(h_F, C_F, params)
    d = 1e-6 * C_F
    dgF = (g_tilde(zeta(C_F + d, params, convention), C_F + d, params)
           - g_tilde(zeta(C_F - d, params, convention), C_F - d, params)) / (2 * d)
    return FoldPoint(h_F=h_F, C_F=C_F, nondegeneracy=nondeg, regularity=(gF, dgF),
                     convention=convention)


# ---------------------------------------------------------------------------
# equilibria of the reduced rescaled flow: cubic in m = C^2


def cubic_coefficients(params: ScaledParams, convention: str = "printed") -> tuple:
    """(a3, a2, a1, a0) of the equilibrium cubic P(m) with m = C^2."""
    dc = derived_constants(params)
    A = dc.pick(convention)
    kh4 = params.hat_K_h**4
    gct = params.gamma * params.c_t
    rho = A / dc.A_IPR
    a3 = rho / gct
    a2 = -kh4 - rho * params.hat_K * gct
    a1 = kh4 * rho / gct
    a0 = -params.hat_K * kh4 * gct * rho
    return a3, a2, a1, a0


@dataclass(frozen=True)
class CubicRoots:
    coefficients: tuple
    roots_m: tuple        # positive real roots of P(m), ascending
    C_values: tuple       # sqrt of each root
    double_root: bool
    convention: str


def equilibria_cubic(params: ScaledParams, convention: str = "printed",
                     imag_tol: float = 1e-9, pos_tol: float = 1e-9) -> CubicRoots:
    """Positive real roots of the equilibrium cubic.

    Solved via the companion matrix (np.roots) and polished with a few Newton
    steps; robust near the cusp where roots coalesce.  Roots closer together
    than 1e-7 of their size are flagged as a double root (tangency).
    """
    coeffs = cubic_coefficients(params, convention)
    a3, a2, a1, a0 = coeffs
    raw = np.roots([a3, a2, a1, a0])
    P = lambda m: ((a3 * m + a2) * m + a1) * m + a0
    dP = lambda m: (3.0 * a3 * m + 2.0 * a2) * m + a1
    roots = []
    for z in raw:
        if abs(z.imag) > imag_tol * max(1.0, abs(z)):
            continue
        m = float(z.real)
        if m <= pos_tol:
            continue
        for _ in range(3):  # Newton polish
            d = dP(m)
            if d == 0.0:
                break
            m -= P(m) / d
        if m > pos_tol:
            roots.append(m)
    roots.sort()
    double = any(abs(roots[i + 1] - roots[i]) < 1e-7 * max(1.0, roots[i])
                 for i in range(len(roots) - 1))
    # collapse numerically identical polished roots
    uniq = []
    for m in roots:
        if not uniq or abs(m - uniq[-1]) > 1e-9 * max(1.0, m):
            uniq.append(m)
    return CubicRoots(coefficients=coeffs, roots_m=tuple(uniq),
                      C_values=tuple(math.sqrt(m) for m in uniq),
                      double_root=double, convention=convention)


# ---------------------------------------------------------------------------
# exact equilibria of the full system and the instability bounds


def equilibrium_full(params: ScaledParams, eps: float | None = None,
                     n_scan: int = 4000) -> list[model.State]:
    """All equilibria of the exact scaled system at the given eps.

    The gating nullcline is eliminated analytically (h is slaved to c), so
    equilibria are bracketed roots of the one-dimensional calcium balance.
    """
    e = params.eps if eps is None else eps
    kh4e = e**2 * params.hat_K_h**4

    def h_of_c(c):
        return kh4e / (kh4e + c**4)

    def balance(c):
        return model.rhs_full((h_of_c(c), c), params, e)[1]

    cs = np.linspace(1e-6, 0.999 * params.c_t, n_scan)
    vals = np.array([balance(c) for c in cs])
    out = []
    for i in range(n_scan - 1):
        if vals[i] == 0.0:
            out.append(cs[i])
        elif vals[i] * vals[i + 1] < 0.0:
            out.append(brentq(balance, cs[i], cs[i + 1], xtol=1e-15, rtol=8.9e-16))
    return [model.State(h=h_of_c(c), c=c) for c in out]


def assumption_bounds(C_star: float, params: ScaledParams,
                      convention: str = "printed") -> tuple:
    """(lhs, rhs) of the instability inequality chain at a given C*."""
    dc = derived_constants(params)
    A = dc.pick(convention)
    kh4 = params.hat_K_h**4
    lhs = 2.0 * dc.A_IPR * kh4 * params.gamma * params.c_t / A
    C_F = fold_point(params, convention).C_F
    rhs = (kh4 + C_star**4) * (C_star**2 - C_F**2) / C_star**8
    return lhs, rhs


@dataclass(frozen=True)
class AssumptionOneReport:
    root_count: int
    C_star: float
    h_star: float
    lhs: float
    rhs: float
    satisfied: bool
    convention: str
    C_star_cubic: tuple


def check_assumption_one(params: ScaledParams,
                         convention: str = "printed") -> AssumptionOneReport:
    """Unique-unstable-equilibrium check.

    The root count comes from the convention's cubic; C* itself is taken from
    the exact full-system equilibrium (the authoritative location, which the
    published worked numbers correspond to), with the cubic's own roots
    reported alongside.
    """
    cub = equilibria_cubic(params, convention)
    eqs = equilibrium_full(params)
    if len(eqs) == 1:
        st = eqs[0]
    else:
        st = max(eqs, key=lambda s: s.c)  # ambiguous case; flagged via root_count
    C_star = st.c / params.delta
    lhs, rhs = assumption_bounds(C_star, params, convention)
    C_F = fold_point(params, convention).C_F
    satisfied = (len(cub.roots_m) == 1 and C_star > C_F and lhs > rhs > 0.0)
    return AssumptionOneReport(root_count=len(cub.roots_m), C_star=C_star,
                               h_star=st.h, lhs=lhs, rhs=rhs, satisfied=satisfied,
                               convention=convention, C_star_cubic=cub.C_values)


# ---------------------------------------------------------------------------
# layer-problem heteroclinic (fast fiber from the fold height down to S_c)


@dataclass(frozen=True)
class HeteroclinicOrbit:
    h: np.ndarray
    c: np.ndarray
    c_d: float          # drop value: c at h -> 0
    h_start: float

    def sample(self, h_values):
        return np.interp(-np.asarray(h_values), -self.h, self.c)


def layer_heteroclinic(params: ScaledParams, h_start: float,
                       rtol: float = 1e-12, atol: float = 1e-14,
                       n_samples: int = 2000) -> HeteroclinicOrbit:
    """Layer-problem fiber c(h) integrated in h from (h_start, 0) down to h=0.

    Using h as the independent variable avoids the time singularity of the
    layer flow at c = 0; the slope field extends smoothly there.
    """
    if h_start <= 0:
        raise ValueError("h_start must be positive")
    c_max = 2.0 * params.c_t

    def slope(h, y):
        c = y[0]
        return [-params.hat_tau_max * _jipr_factor(h, max(c, 0.0), params)]

    def escape(h, y):
        return y[0] - c_max
    escape.terminal = True

    sol = solve_ivp(slope, (h_start, 0.0), [0.0], method="DOP853", rtol=rtol,
                    atol=atol, dense_output=True, events=escape)
    if sol.t_events[0].size or not sol.success:
        raise HeteroclinicError(
            f"layer fiber left [0, {c_max}] (h_start={h_start}): {sol.message}")
    hs = np.linspace(h_start, 0.0, n_samples)
    cs = sol.sol(hs)[0]
    if cs.min() < -1e-12:
        raise HeteroclinicError("layer fiber left c >= 0")
    return HeteroclinicOrbit(h=hs, c=cs, c_d=float(cs[-1]), h_start=h_start)
