"""Model evaluators: gating functions, fluxes, full right-hand sides, the
small-parameter series expansion, and the exact regime-two rescaled system.

All evaluators are pure functions of their arguments and safe to call
concurrently.  Hill functions clip calcium at zero so integrator undershoot
below 0 by a rounding error cannot produce complex/negative powers.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from . import _core
from .params import (DimensionalParams, DimensionlessParams, ScaledParams,
                     ParamsError, derived_constants)

__all__ = [
    "State",
    "RegimeTwoState",
    "GatingValues",
    "Fluxes",
    "gating_functions",
    "open_probability",
    "fluxes",
    "rhs_full",
    "rhs_tilde",
    "rhs_expansion",
    "rhs_regime2",
    "rhs_regime2_hopf",
    "h_inf_regime2",
    "po_leading",
    "po_correction_printed",
    "make_rhs",
    "make_rhs_with_div",
    "make_rhs_regime2",
    "make_rhs_regime2_hopf",
]


class State(NamedTuple):
    """Phase-space point of the planar model: gating fraction and calcium."""

    h: float
    c: float


class RegimeTwoState(NamedTuple):
    """Point in the rescaled small-calcium regime, C = c/delta."""

    h: float
    C: float
    delta: float


class GatingValues(NamedTuple):
    tau_h: float
    h_inf: float
    m_alpha: float
    phi_p: float
    phi_pdown: float


class Fluxes(NamedTuple):
    J_IPR: float
    J_SERCA_plus: float
    J_SERCA_minus: float


def _effective(params, eps=None):
    """Collapse any tier to effective (K_h, K_tau, tau_max, V_s, K, ...) values.

    For the scaled tier the small parameters are reconstructed from eps:
    K_tau = sqrt(eps), K_h = hat_K_h*sqrt(eps), tau_max = hat_tau_max/eps^2,
    V_s = eps*hat_V_s, K = eps*hat_K.
    """
    if isinstance(params, (DimensionalParams, DimensionlessParams)):
        if eps is not None:
            raise ParamsError("eps override only applies to the scaled tier")
        return (params.k_beta, params.K_c, params.K_h, params.K_p, params.K_tau,
                params.K_s, params.k_IPR, params.tau_max, params.c_t, params.p,
                params.V_s, params.K, params.gamma)
    if isinstance(params, ScaledParams):
        e = params.eps if eps is None else eps
        ktau = math.sqrt(e)
        return (params.k_beta, params.K_c, params.hat_K_h * ktau, params.K_p,
                ktau, params.K_s, params.k_IPR, params.hat_tau_max / e**2,
                params.c_t, params.p, params.hat_V_s * e, params.hat_K * e,
                params.gamma)
    raise ParamsError(f"unsupported parameter object {type(params).__name__}")


def gating_functions(c: float, params, eps: float | None = None) -> GatingValues:
    """Hill-type gating quantities at calcium level c (any tier)."""
    (k_beta, K_c, K_h, K_p, K_tau, K_s, k_IPR, tau_max, c_t, p, V_s, K,
     gamma) = _effective(params, eps)
    cp = max(c, 0.0)
    c4 = cp**4
    tau_h = tau_max * K_tau**4 / (K_tau**4 + c4)
    h_inf = K_h**4 / (K_h**4 + c4)
    m_alpha = c4 / (K_c**4 + c4)
    phi_p = p**2 / (K_p**2 + p**2)
    phi_pdown = K_p**2 / (K_p**2 + p**2)
    return GatingValues(tau_h, h_inf, m_alpha, phi_p, phi_pdown)


def open_probability(h: float, c: float, params, eps: float | None = None) -> float:
    """IPR open probability; rapid activation weighted against slow
    inactivation through the gating variable h."""
    g = gating_functions(c, params, eps)
    beta = g.phi_p * g.m_alpha * h
    alpha = g.phi_pdown * (1.0 - g.m_alpha * g.h_inf)
    k_beta = params.k_beta
    return beta / (beta + k_beta * (beta + alpha))


def fluxes(h: float, c: float, params, eps: float | None = None) -> Fluxes:
    """Receptor and pump fluxes (J_IPR, J_SERCA+, J_SERCA-).

    For the scaled tier these are the hatted flux functions, i.e. without the
    explicit eps prefactors that appear in the evolution equation.
    """
    (k_beta, K_c, K_h, K_p, K_tau, K_s, k_IPR, tau_max, c_t, p, V_s, K,
     gamma) = _effective(params, eps)
    cp = max(c, 0.0)
    po = open_probability(h, c, params, eps)
    j_ipr = k_IPR * po * (gamma * c_t - (1.0 + gamma) * c)
    den = K_s**2 + cp**2
    if isinstance(params, ScaledParams):
        hat_vs, hat_k = params.hat_V_s, params.hat_K
    else:
        hat_vs, hat_k = V_s, K
    j_plus = hat_vs * cp**2 / den
    j_minus = hat_k * gamma**2 * hat_vs * (c_t - cp) ** 2 / den
    return Fluxes(j_ipr, j_plus, j_minus)


def _kernel_args(sp: ScaledParams, eps=None):
    e = sp.eps if eps is None else eps
    return (e, sp.k_beta, sp.K_c, sp.K_s, sp.K_p, sp.k_IPR, sp.p, sp.c_t,
            sp.gamma, sp.hat_tau_max, sp.hat_K_h, sp.hat_V_s, sp.hat_K)


def rhs_full(state, params: ScaledParams, eps: float | None = None) -> np.ndarray:
    """Exact right-hand side of the scaled system at (h, c)."""
    h, c = state
    return np.array(_core.rhs_scaled(h, c, *_kernel_args(params, eps)))


def rhs_tilde(state, params: DimensionlessParams | DimensionalParams) -> np.ndarray:
    """Right-hand side of the unscaled (dimensional or dimensionless) model."""
    h, c = state
    g = gating_functions(c, params)
    fl = fluxes(h, c, params)
    return np.array([(g.h_inf - h) / g.tau_h, fl.J_IPR - fl.J_SERCA_plus + fl.J_SERCA_minus])


def make_rhs(params: ScaledParams, eps: float | None = None):
    """Closure f(t, y) over the kernel backend, for the integrators."""
    args = _kernel_args(params, eps)
    k = _core.rhs_scaled
    def f(t, y):
        return k(y[0], y[1], *args)
    return f


def make_rhs_with_div(params: ScaledParams, eps: float | None = None):
    """Closure f(t, (h, c, q)) where q accumulates the field divergence."""
    args = _kernel_args(params, eps)
    k = _core.rhs_scaled_with_div
    def f(t, y):
        return k(y[0], y[1], *args)
    return f


# ---------------------------------------------------------------------------
# series expansion in eps


def po_leading(h: float, c: float, sp: ScaledParams) -> float:
    """Leading-order open probability (the eps -> 0 limit at c > 0)."""
    p2 = sp.p**2
    num = p2 * c**4 * h
    den = p2 * (1.0 + sp.k_beta) * c**4 * h + sp.k_beta * sp.K_p**2 * (sp.K_c**4 + c**4)
    return num / den


def po_correction_printed(h: float, c: float, sp: ScaledParams) -> float:
    """The published second-order open-probability coefficient.

    The true Taylor coefficient of eps^2 is hat_K_h^4 times this quantity;
    the expansion below applies that factor.
    """
    p2 = sp.p**2
    den = c**4 * h * (sp.k_beta + 1.0) * p2 + sp.k_beta * sp.K_p**2 * (c**4 + sp.K_c**4)
    return sp.k_beta * sp.K_p**2 * p2 * c**4 * h / den**2


def rhs_expansion(state, params: ScaledParams):
    """Orders (g, W1, W2) of the expansion rhs = g + eps*W1 + eps^2*W2 + O(eps^4).

    g = N*f with f = c^4*h; the residual after W2 is O(eps^4) pointwise for
    c > 0 (odd orders vanish identically).
    """
    h, c = state
    sp = params
    pref = sp.gamma * sp.c_t - (1.0 + sp.gamma) * c
    g = np.array([-h * c**4 / sp.hat_tau_max,
                  sp.k_IPR * po_leading(h, c, sp) * pref])
    den = sp.K_s**2 + c**2
    W1 = np.array([0.0, -sp.hat_V_s * c**2 / den])
    kh4 = sp.hat_K_h**4
    W2 = np.array([
        (kh4 - h) / sp.hat_tau_max,
        kh4 * sp.k_IPR * po_correction_printed(h, c, sp) * pref
        + sp.hat_K * sp.gamma**2 * sp.hat_V_s * (sp.c_t - c) ** 2 / den,
    ])
    return g, W1, W2


# ---------------------------------------------------------------------------
# regime-two rescaled system (exact change of variables, safe at delta = 0)


def h_inf_regime2(C: float, sp: ScaledParams) -> float:
    """Gating set-point in rescaled coordinates; exact for every delta."""
    kh4 = sp.hat_K_h**4
    return kh4 / (kh4 + C**4)


def _regime2_dC(h: float, C: float, delta: float, sp: ScaledParams) -> float:
    """Exact dC/dt1; the delta -> 0 limit is the rescaled layer field."""
    d4C4 = (delta * C) ** 4
    kc4 = sp.K_c**4
    phi_p = sp.p**2 / (sp.K_p**2 + sp.p**2)
    phi_pdown = sp.K_p**2 / (sp.K_p**2 + sp.p**2)
    beta_hat = phi_p * h * C**4 / (kc4 + d4C4)
    alpha = phi_pdown * (1.0 - d4C4 / (kc4 + d4C4) * h_inf_regime2(C, sp))
    po_over_d4 = beta_hat / (delta**4 * beta_hat * (1.0 + sp.k_beta) + sp.k_beta * alpha)
    j_ipr = sp.k_IPR * (sp.gamma * sp.c_t - (1.0 + sp.gamma) * delta * C) * po_over_d4
    den = sp.K_s**2 + (delta * C) ** 2
    j_plus = sp.hat_V_s * C**2 / den
    j_minus = sp.hat_K * sp.gamma**2 * sp.hat_V_s * (sp.c_t - delta * C) ** 2 / den
    return j_ipr - j_plus + j_minus


def rhs_regime2(state, params: ScaledParams, delta: float | None = None) -> np.ndarray:
    """Exact (dh/dt1, dC/dt1) of the rescaled system on the intermediate-slow
    timescale t1 = delta^3 t, obtained by substituting c = delta*C into the
    full field (not a truncation)."""
    h, C = state[0], state[1]
    d = params.delta if delta is None else delta
    dh = d * (C**4 + 1.0) * (h_inf_regime2(C, params) - h) / params.hat_tau_max
    return np.array([dh, _regime2_dC(h, C, d, params)])


def rhs_regime2_hopf(state, nu_max: float, params: ScaledParams,
                     delta: float | None = None) -> np.ndarray:
    """Rescaled system under tau_max = delta*nu_max: the gating equation loses
    its delta prefactor, so delta = 0 leaves a regular perturbation problem."""
    if nu_max <= 0:
        raise ParamsError(f"nu_max must be positive, got {nu_max}")
    h, C = state[0], state[1]
    d = params.delta if delta is None else delta
    dh = (C**4 + 1.0) * (h_inf_regime2(C, params) - h) / nu_max
    return np.array([dh, _regime2_dC(h, C, d, params)])


def make_rhs_regime2(params: ScaledParams, delta: float | None = None):
    d = params.delta if delta is None else delta
    def f(t, y):
        return rhs_regime2(y, params, d)
    return f


def make_rhs_regime2_hopf(params: ScaledParams, nu_max: float,
                          delta: float | None = None):
    d = params.delta if delta is None else delta
    def f(t, y):
        return rhs_regime2_hopf(y, nu_max, params, d)
    return f
