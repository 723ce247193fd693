import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from calcilab.params import (DimensionalParams, ParamsError, a_serca,
                             default_dimensional, default_dimensionless,
                             default_scaled, derived_constants, fingerprint,
                             hat_scale, load_params, nondimensionalize,
                             parse_params, redimensionalize, save_params, unhat)


def test_default_tiers_load():
    dp = default_dimensional()
    tp = default_dimensionless()
    sp = default_scaled()
    assert dp.tier == "dimensional" and tp.tier == "dimensionless" and sp.tier == "scaled"
    assert dp.tau_max == 1000 and dp.K == 0.00001957
    assert tp.tau_max == 55000 and tp.K_tau == 0.05
    assert sp.eps == 0.0025 and sp.hat_tau_max == 0.34


def test_nondimensionalize_table_anchors():
    tp = nondimensionalize(default_dimensional())
    assert tp.Q_c == 2.0
    assert tp.T == pytest.approx(1 / 55)
    assert tp.k_IPR == pytest.approx(0.18, abs=0.005)
    assert tp.V_s == pytest.approx(0.0081, abs=2e-4)
    assert tp.K_tau == pytest.approx(0.05)
    assert tp.c_t == 1.0   # by construction Q_c = c_t
    assert tp.K == 0.00001957  # already dimensionless, not rescaled


def test_nondimensionalize_unit_scales_identity():
    dp = default_dimensional()
    tp = nondimensionalize(dp, Q_c=1.0, T=1.0)
    for name in ("K_c", "K_h", "K_p", "K_tau", "K_s", "k_IPR", "tau_max",
                 "c_t", "p", "V_s", "K"):
        assert getattr(tp, name) == getattr(dp, name)


def test_hat_scale_table_anchors():
    sp = hat_scale(default_dimensionless())
    assert sp.eps == pytest.approx(0.0025)
    assert sp.hat_tau_max == pytest.approx(0.34, abs=0.005)
    assert sp.hat_K_h == pytest.approx(0.8)
    assert sp.hat_V_s == pytest.approx(3.24)
    assert sp.hat_K == pytest.approx(0.0076)


def test_hat_scale_unit_half_value():
    tp = nondimensionalize(default_dimensional(), Q_c=1.0, T=1.0)
    # with K_tau = 1 the hat tier coincides with the tilde tier
    import dataclasses
    tp1 = dataclasses.replace(tp, K_tau=1.0)
    sp = hat_scale(tp1)
    assert sp.eps == 1.0
    assert sp.hat_tau_max == tp1.tau_max
    assert sp.hat_K_h == tp1.K_h
    assert sp.hat_V_s == tp1.V_s
    assert sp.hat_K == tp1.K


def test_round_trips_are_identities():
    dp = default_dimensional()
    tp = nondimensionalize(dp)
    back = redimensionalize(tp)
    for f in dp.__dataclass_fields__:
        assert getattr(back, f) == pytest.approx(getattr(dp, f), rel=1e-12)
    sp = hat_scale(tp)
    tp2 = unhat(sp, Q_c=tp.Q_c, T=tp.T)
    for f in tp.__dataclass_fields__:
        assert getattr(tp2, f) == pytest.approx(getattr(tp, f), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(ktau=st.floats(0.01, 0.5), tau=st.floats(1.0, 1e6), vs=st.floats(1e-4, 1.0))
def test_hat_round_trip_property(ktau, tau, vs):
    import dataclasses
    tp = dataclasses.replace(default_dimensionless(), K_tau=ktau, tau_max=tau, V_s=vs)
    sp = hat_scale(tp)
    tp2 = unhat(sp, Q_c=tp.Q_c, T=tp.T)
    assert tp2.K_tau == pytest.approx(ktau, rel=1e-12)
    assert tp2.tau_max == pytest.approx(tau, rel=1e-12)
    assert tp2.V_s == pytest.approx(vs, rel=1e-12)


def test_derived_constants_values(sp=None):
    sp = default_scaled()
    dc = derived_constants(sp)
    assert dc.A_IPR == pytest.approx(281.25)
    assert dc.A_SERCA == pytest.approx(74.4876)
    assert dc.A_SERCA_alt == pytest.approx(324.0)
    assert a_serca(sp, "printed") == dc.A_SERCA
    assert a_serca(sp, "derived") == dc.A_SERCA_alt
    with pytest.raises(ParamsError):
        dc.pick("bogus")


def test_validation_rejects_nonpositive_and_gamma():
    with pytest.raises(ParamsError):
        DimensionalParams(k_beta=0.4, K_c=0.2, K_h=0.08, K_p=0.2, K_tau=0.1,
                          K_s=0.2, k_IPR=10, tau_max=-1, c_t=2, p=0.05,
                          V_s=0.9, K=2e-5, gamma=5.5)
    with pytest.raises(ParamsError):
        DimensionalParams(k_beta=0.4, K_c=0.2, K_h=0.08, K_p=0.2, K_tau=0.1,
                          K_s=0.2, k_IPR=10, tau_max=1000, c_t=2, p=0.05,
                          V_s=0.9, K=2e-5, gamma=0.5)


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParamsError, match=r"<s>:2: invalid numeric"):
        parse_params("tier = scaled\nk_beta = abc\n", source="<s>")
    with pytest.raises(ParamsError, match="missing mandatory 'tier"):
        parse_params("k_beta = 0.4\n")
    with pytest.raises(ParamsError, match=r":3: key 'hat_V_s' does not belong"):
        parse_params("tier = dimensional\nk_beta = 0.4\nhat_V_s = 3.24\n")
    with pytest.raises(ParamsError, match="missing keys"):
        parse_params("tier = scaled\nk_beta = 0.4\n")
    with pytest.raises(ParamsError, match="duplicate key"):
        parse_params("tier = scaled\nk_beta = 0.4\nk_beta = 0.5\n")
    with pytest.raises(ParamsError, match="tier must be one of"):
        parse_params("tier = bananas\n")


def test_load_missing_file(tmp_path):
    with pytest.raises(ParamsError, match="not found"):
        load_params(tmp_path / "nope.txt")


def test_save_load_round_trip(tmp_path):
    sp = default_scaled()
    path = tmp_path / "p.txt"
    save_params(sp, path)
    sp2 = load_params(path)
    assert sp2 == sp
    assert fingerprint(sp2) == fingerprint(sp)


def test_fingerprint_distinguishes_tiers():
    assert fingerprint(default_scaled()) != fingerprint(default_dimensionless())
