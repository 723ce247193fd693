import dataclasses
import math

import numpy as np
import pytest

from calcilab import gspt, model
from calcilab.params import derived_constants


# ---------------------------------------------------------------------------
# decomposition


def test_decompose_identity_on_grid(sp):
    dec = gspt.decompose(sp)
    hs = np.linspace(0.02, 1.0, 20)
    cs = np.linspace(0.05, 1.0, 20)
    for eps in (0.01, 0.0025, 0.001):
        for h in hs:
            for c in cs:
                lhs = dec.rhs((h, c), eps)
                rhs = model.rhs_full((h, c), sp, eps=eps)
                scale = max(1.0, float(np.max(np.abs(rhs))))
                assert np.max(np.abs(lhs - rhs)) < 1e-10 * scale


def test_decompose_f_vanishes_on_manifolds(sp):
    dec = gspt.decompose(sp)
    assert dec.f((0.0, 0.7)) == 0.0
    assert dec.f((0.4, 0.0)) == 0.0


def test_decompose_eps0_limit(sp):
    dec = gspt.decompose(sp)
    g, W1, _ = model.rhs_expansion((0.3, 0.4), sp)
    assert np.allclose(dec.G((0.3, 0.4), 0.0), W1)


# ---------------------------------------------------------------------------
# eigenvalues


def test_eigenvalue_S_c_anchor(sp):
    pt = gspt.manifold_point("S_c", 1.0, sp)
    assert pt.eigenvalue == pytest.approx(-1.0 / 0.34)  # ~ -2.941
    assert not pt.degenerate


def test_eigenvalue_S_h_degenerate(sp):
    pt = gspt.manifold_point("S_h", 0.5, sp)
    assert pt.eigenvalue == 0.0
    assert pt.degenerate


def test_eigenvalue_zero_at_fold(sp):
    fold = gspt.fold_point(sp, "printed")
    assert gspt.lambda_S(fold.C_F, sp, "printed") == pytest.approx(0.0, abs=1e-12)


def test_eigenvalue_matches_fd_jacobian(sp, rng):
    """<grad f, N> equals the transverse eigenvalue of the layer linearization
    at on-manifold points (50 random points on S_c)."""
    dec = gspt.decompose(sp)
    d = 1e-6
    for _ in range(50):
        c = rng.uniform(0.1, 1.5)
        J = np.zeros((2, 2))
        for j, (dh, dc) in enumerate(((d, 0.0), (0.0, d))):
            fp = dec.N((dh, c + dc)) * dec.f((dh, c + dc))
            fm = dec.N((-dh, c - dc)) * dec.f((-dh, c - dc))
            J[:, j] = (fp - fm) / (2 * d)
        eigs = np.linalg.eigvals(J).real
        lam = gspt.nontrivial_eigenvalue(("S_c", (0.0, c)), sp)
        assert min(abs(eigs - lam)) < 1e-6 * max(1.0, abs(lam))


def test_rescaled_eigenvalue_matches_fd(sp, rng):
    # derived-convention lambda equals the exact rescaled layer derivative
    for _ in range(20):
        C = rng.uniform(0.3, 2.5)
        h = gspt.zeta(C, sp, "derived")
        d = 1e-6
        lam_fd = (model.rhs_regime2((h, C + d), sp, delta=0.0)[1]
                  - model.rhs_regime2((h, C - d), sp, delta=0.0)[1]) / (2 * d)
        lam = gspt.lambda_S(C, sp, "derived")
        assert lam_fd == pytest.approx(lam, rel=1e-6, abs=1e-6)


# ---------------------------------------------------------------------------
# reduced fields


def test_reduced_field_on_Sc(sp):
    pt = gspt.manifold_point("S_c", 0.0, sp)
    assert np.allclose(gspt.reduced_field(pt, sp), 0.0)
    pt = gspt.manifold_point("S_c", 0.6, sp)
    vec = gspt.reduced_field(pt, sp)
    assert vec[0] == 0.0          # tangent to S_c exactly
    assert vec[1] < 0.0            # monotone drainage toward the origin


def test_reduced_field_rejects_degenerate(sp):
    with pytest.raises(gspt.NonHyperbolicError):
        gspt.reduced_field(gspt.manifold_point("S_h", 0.3, sp), sp)
    fold = gspt.fold_point(sp, "printed")
    with pytest.raises(gspt.NonHyperbolicError):
        gspt.reduced_field(gspt.manifold_point("S_a", fold.C_F, sp, "printed"), sp)


def test_reduced_field_zero_at_equilibrium(sp):
    cub = gspt.equilibria_cubic(sp, "derived")
    C = cub.C_values[0]
    pt = gspt.manifold_point("S_r", C, sp, "derived")
    assert np.allclose(gspt.reduced_field(pt, sp, "derived"), 0.0, atol=1e-9)


def test_reduced_field_blowup_at_fold(sp):
    """|dC/dtau| grows monotonically (to infinity) as C decreases to C_F
    from above, over four decades of C - C_F."""
    fold = gspt.fold_point(sp, "derived")
    speeds = []
    for k in range(5):
        C = fold.C_F + 10.0 ** (-k) * 0.1
        pt = gspt.manifold_point("S_r", C, sp, "derived")
        speeds.append(abs(gspt.reduced_field(pt, sp, "derived")[1]))
    assert all(s2 > s1 for s1, s2 in zip(speeds[:-1], speeds[1:]))
    assert speeds[-1] > 1e3 * speeds[0]


# ---------------------------------------------------------------------------
# zeta and the fold


def test_zeta_zero_and_fold_height(sp):
    g, ct = sp.gamma, sp.c_t
    C0 = math.sqrt(sp.hat_K) * g * ct
    for conv in ("printed", "derived"):
        assert gspt.zeta(C0, sp, conv) == pytest.approx(0.0, abs=1e-15)
        fold = gspt.fold_point(sp, conv)
        assert gspt.zeta(fold.C_F, sp, conv) == pytest.approx(fold.h_F, rel=1e-12)


def test_zeta_printed_anchors(sp):
    dc = derived_constants(sp)
    assert dc.A_IPR == pytest.approx(281.25)
    assert dc.A_SERCA == pytest.approx(74.49, abs=0.01)
    fold = gspt.fold_point(sp, "printed")
    assert fold.C_F == pytest.approx(0.678, abs=0.001)
    assert fold.h_F == pytest.approx(0.0524, abs=0.0001)


def test_zeta_critical_at_fold(sp):
    for conv in ("printed", "derived"):
        fold = gspt.fold_point(sp, conv)
        d = 1e-6
        deriv = (gspt.zeta(fold.C_F + d, sp, conv)
                 - gspt.zeta(fold.C_F - d, sp, conv)) / (2 * d)
        assert abs(deriv) < 1e-8 * max(1.0, abs(fold.h_F))


def test_fold_nondegeneracy_and_regularity(sp):
    for conv in ("printed", "derived"):
        fold = gspt.fold_point(sp, conv)
        A = derived_constants(sp).pick(conv)
        assert fold.nondegeneracy[0] == pytest.approx(4.0 * A)
        expect = 4.0 * derived_constants(sp).A_IPR * sp.hat_K**2 * sp.gamma**5 * sp.c_t**5
        assert fold.nondegeneracy[1] == pytest.approx(expect)
        assert fold.nondegeneracy[0] > 0 and fold.nondegeneracy[1] > 0
        g_F, dg_F = fold.regularity
        assert g_F != 0.0 and dg_F != 0.0


def test_fold_collapses_with_K(sp):
    tiny = dataclasses.replace(sp, hat_K=1e-12)
    assert gspt.fold_point(tiny, "printed").C_F < 1e-5


def test_f0_leading_consistency(sp, rng):
    # derived-convention leading field == exact delta -> 0 rescaled field
    for _ in range(20):
        h = rng.uniform(0.0, 0.6)
        C = rng.uniform(0.2, 2.5)
        a = gspt.f0_leading(h, C, sp, "derived")
        b = model.rhs_regime2((h, C), sp, delta=0.0)[1]
        assert a == pytest.approx(b, rel=1e-10, abs=1e-10)


def test_f_rem_is_first_delta_correction(sp):
    # (exact(delta) - exact(0))/delta -> f_rem as delta -> 0 ("printed" value)
    h, C = 0.2, 1.1
    f0 = model.rhs_regime2((h, C), sp, delta=0.0)[1]
    ds = (1e-3, 1e-4, 1e-5)
    slopes = [(model.rhs_regime2((h, C), sp, delta=d)[1] - f0) / d for d in ds]
    frem = gspt.f_rem_leading(h, C, sp, "printed")
    assert slopes[-1] == pytest.approx(frem, rel=1e-3)
    # refinement moves the slope toward the formula at first order in delta
    errs = [abs(s - frem) for s in slopes]
    assert errs[0] / errs[1] == pytest.approx(10.0, rel=0.15)
    assert errs[1] / errs[2] == pytest.approx(10.0, rel=0.15)


# ---------------------------------------------------------------------------
# cubic equilibria


def brute_roots(sp, convention, m_max=100.0, n=1_000_000):
    a3, a2, a1, a0 = gspt.cubic_coefficients(sp, convention)
    m = np.linspace(m_max / n, m_max, n)
    P = ((a3 * m + a2) * m + a1) * m + a0
    s = np.sign(P)
    idx = np.nonzero(np.diff(s))[0]
    return [0.5 * (m[i] + m[i + 1]) for i in idx]


@pytest.mark.parametrize("convention", ["printed", "derived"])
def test_cubic_roots_match_brute_scan(sp, convention):
    cub = gspt.equilibria_cubic(sp, convention)
    brute = brute_roots(sp, convention)
    assert len(cub.roots_m) == len(brute)
    for m, mb in zip(cub.roots_m, brute):
        assert m == pytest.approx(mb, abs=1e-4)
        a3, a2, a1, a0 = cub.coefficients
        assert abs(((a3 * m + a2) * m + a1) * m + a0) < 1e-10 * max(abs(a0), 1.0)


def test_cubic_roots_on_zeta_hinf_intersection(sp):
    for conv in ("printed", "derived"):
        cub = gspt.equilibria_cubic(sp, conv)
        for C in cub.C_values:
            assert gspt.zeta(C, sp, conv) == pytest.approx(
                model.h_inf_regime2(C, sp), abs=1e-10)


def test_cubic_three_root_case_and_double_root():
    """Inside the cusp region the cubic has 3 roots; at a tuned parameter two
    of them collide and the tangency is flagged."""
    from calcilab import default_scaled
    sp = default_scaled()
    inside = dataclasses.replace(sp, p=0.03, c_t=0.5)
    cub = gspt.equilibria_cubic(inside, "derived")
    assert len(cub.roots_m) == 3
    assert len(brute_roots(inside, "derived")) == 3

    # walk c_t to the saddle-node boundary: root count drops 3 -> 1 through
    # a double root; bisect on the count to land near the tangency
    lo, hi = 0.5, 0.6
    for _ in range(45):
        mid = 0.5 * (lo + hi)
        n = len(gspt.equilibria_cubic(
            dataclasses.replace(sp, p=0.03, c_t=mid), "derived").roots_m)
        if n >= 3:
            lo = mid
        else:
            hi = mid
    near = gspt.equilibria_cubic(
        dataclasses.replace(sp, p=0.03, c_t=lo), "derived")
    assert near.double_root or len(near.roots_m) == 3


def test_derived_cubic_near_paper_window(sp):
    cub = gspt.equilibria_cubic(sp, "derived")
    assert len(cub.C_values) == 1
    assert 1.4 <= cub.C_values[0] <= 1.5


# ---------------------------------------------------------------------------
# instability bounds


def test_assumption_bounds_printed_anchor(sp):
    lhs, rhs = gspt.assumption_bounds(1.48, sp, "printed")
    assert lhs == pytest.approx(17.01, rel=5e-3)
    assert rhs == pytest.approx(0.391, rel=5e-3)


def test_check_assumption_one(sp):
    rep = gspt.check_assumption_one(sp, "printed")
    assert rep.root_count == 1
    assert rep.C_star == pytest.approx(1.48, abs=0.01)
    assert rep.h_star == pytest.approx(0.0792, abs=0.001)
    assert rep.satisfied
    assert rep.lhs > rep.rhs > 0


def test_assumption_fails_when_Cstar_below_fold(sp):
    fold = gspt.fold_point(sp, "printed")
    lhs, rhs = gspt.assumption_bounds(0.8 * fold.C_F, sp, "printed")
    assert rhs < 0  # rightmost inequality fails for C* < C_F


# ---------------------------------------------------------------------------
# layer heteroclinic


def test_heteroclinic_slope_pattern(sp):
    het = gspt.layer_heteroclinic(sp, gspt.fold_point(sp, "derived").h_F)
    # drop value positive, curve monotone in c as h decreases below the
    # ER/cytosol balance level
    assert het.c_d > 0
    assert np.all(np.diff(het.c) >= -1e-12)
    balance = sp.gamma * sp.c_t / (1.0 + sp.gamma)
    assert het.c.max() < balance  # slope flips sign only above this level
    # slope zero exactly at the balance concentration
    from calcilab.gspt import _jipr_factor
    assert _jipr_factor(0.1, balance, sp) == pytest.approx(0.0, abs=1e-14)


def test_heteroclinic_step_halving_convergence(sp):
    h_F = gspt.fold_point(sp, "derived").h_F
    a = gspt.layer_heteroclinic(sp, h_F, rtol=1e-10, atol=1e-12)
    b = gspt.layer_heteroclinic(sp, h_F, rtol=1e-13, atol=1e-15)
    assert a.c_d == pytest.approx(b.c_d, rel=1e-8)
    assert b.c_d == pytest.approx(0.49329, abs=2e-4)


def test_heteroclinic_rejects_bad_start(sp):
    with pytest.raises(ValueError):
        gspt.layer_heteroclinic(sp, -0.1)


def test_equilibrium_full_unique_at_defaults(sp):
    eqs = gspt.equilibrium_full(sp)
    assert len(eqs) == 1
    st = eqs[0]
    assert np.allclose(model.rhs_full(st, sp), 0.0, atol=1e-12)
