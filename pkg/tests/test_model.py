import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from calcilab import default_dimensional, default_dimensionless, default_scaled, hat_scale
from calcilab import model
from calcilab.params import ParamsError


@pytest.fixture(scope="module")
def dp():
    return default_dimensional()


@pytest.fixture(scope="module")
def tp():
    return default_dimensionless()


# ---------------------------------------------------------------------------
# gating functions


def test_tau_h_half_value(dp):
    g = model.gating_functions(dp.K_tau, dp)
    assert g.tau_h == pytest.approx(dp.tau_max / 2)  # 500 s


def test_tau_h_direct_substitution(dp):
    # c = 0.2 with K_tau = 0.1: tau_max/(1 + 2^4) = 1000/17
    g = model.gating_functions(0.2, dp)
    assert g.tau_h == pytest.approx(1000.0 / 17.0)


def test_h_inf_half_value(dp):
    g = model.gating_functions(dp.K_h, dp)
    assert g.h_inf == pytest.approx(0.5)


@settings(max_examples=80, deadline=None)
@given(h=st.floats(0, 1), c=st.floats(0, 10))
def test_unit_interval_ranges(h, c):
    sp = default_scaled()
    g = model.gating_functions(c, sp)
    for val in (g.h_inf, g.m_alpha, g.phi_p, g.phi_pdown):
        assert 0.0 <= val <= 1.0
    po = model.open_probability(h, c, sp)
    assert 0.0 <= po <= 1.0
    assert 0.0 < g.tau_h <= sp.hat_tau_max / sp.eps**2 + 1e-12


# ---------------------------------------------------------------------------
# open probability


def test_po_closed_gate(dp):
    assert model.open_probability(0.0, 0.3, dp) == 0.0


def test_po_large_agonist_saturation(dp):
    import dataclasses
    big = dataclasses.replace(dp, p=1e9)
    po = model.open_probability(0.7, 0.3, big)
    assert po == pytest.approx(1.0 / (1.0 + dp.k_beta), rel=1e-6)


def test_po_expansion_cross_check(sp):
    # P_O = P_O0 + eps^2 * Kh^4 * P_O1 + O(eps^4): Richardson ratio ~16
    h, c = 0.0792, 0.074
    assert model.open_probability(h, c, sp) > 0.0
    lead = model.po_leading(h, c, sp)
    corr = sp.hat_K_h**4 * model.po_correction_printed(h, c, sp)
    res = []
    for eps in (4e-3, 2e-3, 1e-3):
        full = model.open_probability(h, c, sp, eps=eps)
        res.append(abs(full - lead - eps**2 * corr))
    assert res[0] / res[1] == pytest.approx(16.0, rel=0.25)
    assert res[1] / res[2] == pytest.approx(16.0, rel=0.25)


# ---------------------------------------------------------------------------
# fluxes


def test_jipr_sign_and_zero(sp):
    c_star = sp.gamma * sp.c_t / (1.0 + sp.gamma)
    assert model.fluxes(0.5, c_star, sp).J_IPR == pytest.approx(0.0, abs=1e-15)
    assert model.fluxes(0.5, c_star - 0.1, sp).J_IPR > 0.0
    assert model.fluxes(0.5, c_star + 0.1, sp).J_IPR < 0.0


def test_serca_anchors(sp):
    fl0 = model.fluxes(0.3, 0.0, sp)
    assert fl0.J_SERCA_plus == 0.0
    expect = sp.hat_K * sp.gamma**2 * sp.hat_V_s * sp.c_t**2 / sp.K_s**2
    assert fl0.J_SERCA_minus == pytest.approx(expect)
    fl1 = model.fluxes(0.3, sp.c_t, sp)
    assert fl1.J_SERCA_minus == pytest.approx(0.0, abs=1e-15)


# ---------------------------------------------------------------------------
# full right-hand side


def test_rhs_critical_manifolds(sp):
    # on S_c (h = 0) and S_h (c = 0) the eps = 0 field vanishes
    for state in ((0.0, 0.7), (0.4, 0.0)):
        g, W1, W2 = model.rhs_expansion(state, sp)
        assert np.allclose(g, 0.0, atol=1e-15)
    layer = model.rhs_full((0.0, 0.7), sp, eps=0.0)
    assert layer[0] == pytest.approx(0.0, abs=1e-15)


def test_rhs_eps0_equals_layer(sp, rng):
    for _ in range(20):
        h, c = rng.uniform(0.05, 1.0, size=2)
        full0 = model.rhs_full((h, c), sp, eps=0.0)
        g, _, _ = model.rhs_expansion((h, c), sp)
        assert np.allclose(full0, g, rtol=1e-12, atol=1e-15)


def test_rhs_matches_unscaled_model(tp):
    sp_exact = hat_scale(tp)
    for state in ((0.41, 0.33), (0.1, 0.9), (0.8, 0.05)):
        a = model.rhs_full(state, sp_exact, eps=tp.K_tau**2)
        b = model.rhs_tilde(state, tp)
        assert np.allclose(a, b, rtol=1e-12, atol=1e-16)


def test_eps_override_rejected_on_unscaled(tp):
    with pytest.raises(ParamsError):
        model.gating_functions(0.3, tp, eps=0.01)


# ---------------------------------------------------------------------------
# series expansion


def test_expansion_infra_slow_field_on_Sh(sp):
    h = 0.37
    g, W1, W2 = model.rhs_expansion((h, 0.0), sp)
    assert np.allclose(g, 0.0, atol=1e-15)
    assert np.allclose(W1, 0.0, atol=1e-15)
    assert W2[0] == pytest.approx((sp.hat_K_h**4 - h) / sp.hat_tau_max)
    leak0 = sp.hat_K * sp.gamma**2 * sp.hat_V_s * sp.c_t**2 / sp.K_s**2
    assert W2[1] == pytest.approx(leak0)


def test_expansion_slow_field_on_Sc(sp):
    c = 0.55
    g, W1, W2 = model.rhs_expansion((0.0, c), sp)
    assert np.allclose(g, 0.0, atol=1e-15)
    assert W1[0] == 0.0
    assert W1[1] == pytest.approx(-sp.hat_V_s * c**2 / (sp.K_s**2 + c**2))


def test_expansion_richardson_order(sp, rng):
    # residual after the eps^2 term drops by 16 per halving of eps
    for _ in range(20):
        h = rng.uniform(0.05, 1.0)
        c = rng.uniform(0.1, 1.0)
        g, W1, W2 = model.rhs_expansion((h, c), sp)
        res = []
        for eps in (1e-2, 5e-3, 2.5e-3):
            full = model.rhs_full((h, c), sp, eps=eps)
            res.append(np.linalg.norm(full - (g + eps * W1 + eps**2 * W2)))
        assert 16.0 * 0.8 <= res[0] / res[1] <= 16.0 * 1.2
        assert 16.0 * 0.8 <= res[1] / res[2] <= 16.0 * 1.2


# ---------------------------------------------------------------------------
# rescaled (regime-two) system


def test_regime2_exact_change_of_variables(sp, rng):
    d = sp.delta
    for _ in range(25):
        h = rng.uniform(0.02, 1.0)
        C = rng.uniform(0.1, 2.5)
        full = model.rhs_full((h, d * C), sp, eps=d * d)
        r2 = model.rhs_regime2((h, C), sp, delta=d)
        assert r2[0] == pytest.approx(full[0] / d**3, rel=1e-10, abs=1e-13)
        assert r2[1] == pytest.approx(full[1] / d**4, rel=1e-9, abs=1e-10)


def test_regime2_trajectory_equivalence(sp):
    # integrating the full field and the rescaled field gives the same path
    # after the exact time/coordinate mapping
    from calcilab.integrate import IntegratorConfig, integrate
    d = sp.delta
    cfg = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13)
    h0, C0 = 0.12, 1.3
    t1_span = 0.02
    tr2 = integrate(model.make_rhs_regime2(sp, d), (h0, C0), (0.0, t1_span), cfg)
    trf = integrate(model.make_rhs(sp), (h0, d * C0), (0.0, t1_span / d**3), cfg)
    assert trf.y[-1][0] == pytest.approx(tr2.y[-1][0], abs=1e-9)
    assert trf.y[-1][1] / d == pytest.approx(tr2.y[-1][1], abs=1e-8)


def test_regime2_delta0_layer_manifold(sp):
    from calcilab import gspt
    for C in (0.6, 1.0, 1.4):
        h = gspt.zeta(C, sp, "derived")
        out = model.rhs_regime2((h, C), sp, delta=0.0)
        assert out[0] == 0.0                     # gating frozen in the layer limit
        assert out[1] == pytest.approx(0.0, abs=1e-10)  # on the critical curve


def test_regime2_equilibrium_anchor(sp):
    # unstable equilibrium of the delta = 0.05 rescaled system near (0.0792, 1.48)
    from scipy.optimize import brentq
    f = lambda C: model.rhs_regime2((model.h_inf_regime2(C, sp), C), sp)[1]
    C_star = brentq(f, 1.0, 2.0, xtol=1e-13)
    h_star = model.h_inf_regime2(C_star, sp)
    assert C_star == pytest.approx(1.48, abs=0.01)
    assert h_star == pytest.approx(0.0792, abs=0.001)


def test_regime2_hopf_variant(sp):
    # gating nullcline is exact for every delta and nu
    C = 1.2
    h = model.h_inf_regime2(C, sp)
    out = model.rhs_regime2_hopf((h, C), 0.5, sp)
    assert out[0] == pytest.approx(0.0, abs=1e-15)
    # delta = 0 equilibrium of the reduced variant: zero field at the
    # intersection of the nullcline with the critical curve
    from calcilab import gspt
    cub = gspt.equilibria_cubic(sp, "derived")
    C0 = cub.C_values[0]
    out = model.rhs_regime2_hopf((model.h_inf_regime2(C0, sp), C0), 0.3, sp, delta=0.0)
    assert np.allclose(out, 0.0, atol=1e-8)
    with pytest.raises(ParamsError):
        model.rhs_regime2_hopf((h, C), -1.0, sp)


def test_forward_invariance(sp):
    """Trajectories from the unit box stay in the physical region over
    several periods (undershoot tolerance 1e-6)."""
    from calcilab.integrate import IntegratorConfig, integrate
    cfg = IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10)
    field = model.make_rhs(sp)
    horizon = 3.2 * 15835.0
    for y0 in ((0.9, 0.9), (0.05, 0.95), (1.0, 0.02), (0.4, 0.5)):
        traj = integrate(field, y0, (0.0, horizon), cfg)
        assert traj.reason == "time"
        assert traj.y[:, 0].min() >= -1e-6 and traj.y[:, 0].max() <= 1.0 + 1e-6
        assert traj.y[:, 1].min() >= -1e-6 and traj.y[:, 1].max() <= sp.c_t + 1e-6
