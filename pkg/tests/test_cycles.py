import dataclasses
import math

import numpy as np
import pytest

from calcilab import cycles, gspt, model
from calcilab.integrate import IntegratorConfig, Section, integrate, integrate_to_section


# ---------------------------------------------------------------------------
# synthetic system with a known cycle: unit circle, transverse exponent -2


def _radial(t, y):
    x, yy = y[0], y[1]
    r2 = x * x + yy * yy
    return [x * (1.0 - r2) - yy, yy * (1.0 - r2) + x]


def _radial_with_div(t, y):
    # div f = 2 - 4 r^2  (= -2 on the unit cycle)
    out = _radial(t, y)
    r2 = y[0] ** 2 + y[1] ** 2
    return [out[0], out[1], 2.0 - 4.0 * r2]


def test_floquet_known_exponent_divergence_route():
    cfg = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13, method="explicit-adaptive")
    lam = cycles.divergence_quadrature(_radial_with_div, (1.0, 0.0), 2 * math.pi, cfg)
    assert lam == pytest.approx(-2.0, abs=1e-6)


def test_floquet_two_method_agreement():
    """Divergence quadrature vs the log of the return-map derivative, on a
    system where the multiplier is representable."""
    cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14, method="explicit-adaptive")
    section = Section(normal=(0.0, 1.0), offset=0.0, direction=+1)
    period = 2 * math.pi

    def return_x(x0):
        ev = integrate_to_section(_radial, (x0, 0.0), section, cfg,
                                  t_max=3 * period, min_time=1e-6)
        return ev.y[0]

    d = 1e-5
    deriv = (return_x(1.0 + d) - return_x(1.0 - d)) / (2 * d)
    lam_map = math.log(abs(deriv)) / period
    lam_div = cycles.divergence_quadrature(_radial_with_div, (1.0, 0.0), period, cfg)
    assert lam_map == pytest.approx(lam_div, rel=0.1)


# ---------------------------------------------------------------------------
# the relaxation cycle at defaults (session fixture)


def test_cycle_closes_and_attracts(table3_cycle):
    cyc = table3_cycle
    assert cyc.closure_gap < 1e-8
    assert cyc.period > 0
    assert cyc.floquet < 0


def test_cycle_period_anchor(table3_cycle):
    # published time series shows ~2e4; the computed cycle sits within 25%
    assert abs(table3_cycle.period / 2.0e4 - 1.0) < 0.25


def test_return_map_contracts(sp, table3_cycle):
    """Second return displacement is negligible next to the first."""
    field = model.make_rhs(sp)
    cfg = IntegratorConfig(rel_tol=1e-9, abs_tol=1e-11)
    section = Section(normal=(0.0, 1.0), offset=table3_cycle.section_value,
                      direction=-1)
    y0 = np.array([table3_cycle.states[0][0] * 1.3, table3_cycle.section_value])
    ev1 = integrate_to_section(field, y0, section, cfg, t_max=1.2e5, min_time=1.0)
    ev2 = integrate_to_section(field, ev1.y, section, cfg, t_max=1.2e5, min_time=1.0)
    d1 = abs(ev1.y[0] - y0[0])
    d2 = abs(ev2.y[0] - ev1.y[0])
    assert d2 < 1e-6 * d1


def test_cycle_section_independent(sp, table3_cycle):
    other = cycles.find_limit_cycle(sp, section_value=0.30)
    assert other.period == pytest.approx(table3_cycle.period, rel=1e-6)
    d = cycles.hausdorff_distance(other.states, table3_cycle.states)
    assert d < 1e-6


def test_cycle_tolerance_stable(sp, table3_cycle):
    tight = cycles.find_limit_cycle(
        sp, config=IntegratorConfig(rel_tol=5e-10, abs_tol=5e-12))
    assert abs(tight.period - table3_cycle.period) / table3_cycle.period < 1e-3


# ---------------------------------------------------------------------------
# singular cycle


def test_singular_cycle_geometry(sp):
    gam = cycles.singular_cycle(sp, "derived")
    # landing/departure heights of the crawl segment
    assert gam.eps_l1 == pytest.approx(1.0 / (sp.hat_K * sp.gamma**2 * sp.c_t**2))
    assert gam.eps_f1 == pytest.approx(0.5 * gam.eps_l1)
    assert gam.eps_f1 == pytest.approx(2.175, abs=0.001)
    assert gam.eps_l1 == pytest.approx(4.350, abs=0.001)
    # crawl lies on the critical-curve graph between the two heights
    crawl = gam.segments["crawl"]
    from calcilab.blowup import psi_curve
    assert np.allclose(crawl[:, 0], psi_curve(crawl[:, 2], sp, "derived"))
    assert crawl[:, 2].min() == pytest.approx(gam.eps_f1)
    assert crawl[:, 2].max() == pytest.approx(gam.eps_l1)
    # concatenation gaps
    gaps = gam.concatenation_gaps()
    for name in ("Q2", "Q3", "Q4"):
        assert gaps[name] < 1e-8
    assert gaps["Q1"] < 1e-6 and gaps["Q5"] < 1e-6


def test_singular_cycle_printed_fold_height(sp):
    gam = cycles.singular_cycle(sp, "printed")
    assert gam.h_F == pytest.approx(0.0524, abs=1e-4)
    assert gam.q_points["Q5"][0] == gam.h_F
    assert gam.q_points["Q5"][2] == pytest.approx(2.175, abs=0.001)


def test_singular_cycle_blowdown_is_closed_loop(sp):
    gam = cycles.singular_cycle(sp, "derived")
    bd = gam.blowdown
    assert np.linalg.norm(bd[0] - bd[-1]) < 1e-12  # starts/ends at (h_F, 0)... loop closes


# ---------------------------------------------------------------------------
# Hausdorff distance


def test_hausdorff_identical_curves():
    th = np.linspace(0, 2 * np.pi, 500)
    circle = np.column_stack([np.cos(th), np.sin(th)])
    assert cycles.hausdorff_distance(circle, circle.copy()) < 1e-12


def test_hausdorff_concentric_circles():
    th = np.linspace(0, 2 * np.pi, 2000)
    a = np.column_stack([np.cos(th), np.sin(th)])
    b = 1.1 * a
    assert cycles.hausdorff_distance(a, b) == pytest.approx(0.1, abs=2e-3)


def test_hausdorff_cycle_vs_singular_same_decade(sp, table3_cycle):
    gam = cycles.singular_cycle(sp, "derived")
    d = cycles.hausdorff_distance(table3_cycle, gam)
    scale = sp.eps ** (1.0 / 3.0)
    assert 0.1 * scale < d < 10 * scale


# ---------------------------------------------------------------------------
# period estimate


def test_period_order_estimate(sp):
    est = cycles.period_estimate(sp, "printed")
    assert est.order_estimate == pytest.approx(5.44e4, rel=1e-12)
    assert est.quad_error < 1e-8
    assert est.C_start == pytest.approx(math.sqrt(sp.hat_K) * sp.gamma * sp.c_t)
    assert est.C_fold == pytest.approx(math.sqrt(2 * sp.hat_K) * sp.gamma * sp.c_t)


def test_period_estimate_linear_in_tau(sp):
    est1 = cycles.period_estimate(sp, "derived")
    sp2 = dataclasses.replace(sp, hat_tau_max=2 * sp.hat_tau_max)
    est2 = cycles.period_estimate(sp2, "derived")
    assert est2.v == pytest.approx(est1.v, rel=1e-12)   # v independent of tau
    assert est2.refined == pytest.approx(2 * est1.refined, rel=1e-12)


def test_refined_estimate_matches_simulation(sp, table3_cycle):
    est = cycles.period_estimate(sp, "derived")
    assert est.refined == pytest.approx(table3_cycle.period, rel=0.05)


def test_no_cycle_error_carries_iterates(sp):
    quiet = dataclasses.replace(sp, c_t=0.8, p=0.015)  # stable equilibrium
    with pytest.raises(cycles.NoCycleError) as exc:
        cycles.find_limit_cycle(quiet)
    assert len(exc.value.iterates) >= 1
