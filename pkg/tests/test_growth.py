import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from beltrami_growth.capacity import GridSpec
from beltrami_growth.errors import InequalityViolation
from beltrami_growth.fields import dilatation_field, identity_map, log_map, power_map
from beltrami_growth.gfmo import E_E, constant_field, exponent_grid, growth_constant, lemma2_lhs
from beltrami_growth.growth import (EXPONENT_CEILING, DilatationContext, RadialTestFunction, audit_image_capacity,
                                    capacity_chain, dilatation_context, eta_log, eta_loglog, eta_uniform,
                                    image_annulus_modulus, proposition1_check, ringq_rhs, theorem1_report)
from beltrami_growth.geometry import integrate_1d

E = math.e
K0_LOG_MAP = (3 * E ** 2 + 1) / (2 * E ** 2)
UNIFORM_RING_RHS = math.pi * (E + 1) / (E - 1)  # K = 1, uniform eta on (1, e)


def test_uniform_eta_values():
    assert float(eta_uniform(1, 2)(1.5)) == 1.0
    assert float(eta_uniform(1, E)(2.0)) == pytest.approx(1 / (E - 1), rel=1e-15)
    with pytest.raises(ValueError):
        eta_uniform(2, 1)


def test_loglog_eta_values():
    eta = eta_loglog(math.exp(E ** 2))
    assert float(eta(E)) == pytest.approx(1 / (2 * E), rel=1e-14)
    assert integrate_1d(eta_loglog(math.exp(4.2)), E, math.exp(4.2)) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(ValueError):
        eta_loglog(E_E)


def test_unnormalised_eta_rejected():
    with pytest.raises(ValueError):
        RadialTestFunction(lambda t: np.full(np.shape(t), 2.0), (1.0, 2.0), "uniform")


@given(st.floats(1e-2, 1e2), st.floats(1.01, 1e6))
def test_eta_unit_integral_on_random_supports(r1, t):
    r2 = r1 * t
    for eta in (eta_uniform(r1, r2), eta_log(r1, r2)):
        assert integrate_1d(eta, r1, r2) == pytest.approx(1.0, abs=1e-8)


def test_ring_integral_of_unit_dilatation():
    rhs = ringq_rhs(constant_field(1.0), 0j, 1, E, eta_uniform(1, E))
    assert rhs == pytest.approx(UNIFORM_RING_RHS, rel=1e-12)
    assert rhs == pytest.approx(6.7975, abs=1e-3)


@given(st.floats(1.0, 50.0))
def test_ring_integral_linear_in_weight(Q):
    a = ringq_rhs(constant_field(Q), 0j, 1, E, eta_uniform(1, E))
    assert a == pytest.approx(Q * UNIFORM_RING_RHS, rel=1e-12)


@pytest.mark.parametrize("R", [math.exp(E + 0.5), math.exp(6.0), math.exp(15.0)])
def test_ring_integral_matches_shell_integral(R):
    K = dilatation_field(log_map())
    rhs = ringq_rhs(K, 0j, E, R, eta_loglog(R))
    assert rhs == pytest.approx(lemma2_lhs(K, 0j, R) / math.log(math.log(R)) ** 2, rel=1e-8)


def test_ring_integral_support_checked():
    with pytest.raises(ValueError):
        ringq_rhs(constant_field(1.0), 0j, 0.5, E, eta_uniform(1, E))


def test_image_modulus_examples():
    assert image_annulus_modulus(identity_map(), 2, 5) == pytest.approx(2 * math.pi / math.log(2.5))
    assert image_annulus_modulus(power_map(3), 1, E) == pytest.approx(6 * math.pi, rel=1e-14)
    assert image_annulus_modulus(log_map(), E, E ** 3) == pytest.approx(2 * math.pi / math.log(2), rel=1e-14)
    with pytest.raises(ValueError):
        image_annulus_modulus(log_map(), 1, 2, z0=1j)


@given(st.floats(1.0, 10.0), st.floats(0.1, 1e3), st.floats(1e-2, 10), st.floats(1.01, 1e3))
def test_image_modulus_scale_invariant(K, c, r1, t):
    f = power_map(K)
    assert image_annulus_modulus(f.scaled(c), r1, r1 * t) == pytest.approx(image_annulus_modulus(f, r1, r1 * t), rel=1e-12)


def test_ring_inequality_identity_and_power():
    (uni, lg) = proposition1_check(identity_map(), 0j, 1, E)
    assert uni.passed and lg.passed
    assert uni.lhs_modulus == pytest.approx(2 * math.pi)
    assert uni.rhs_integral == pytest.approx(UNIFORM_RING_RHS, rel=1e-12)
    (uni2, _) = proposition1_check(power_map(2), 0j, 1, E)
    assert uni2.lhs_modulus == pytest.approx(4 * math.pi)
    assert uni2.rhs_integral == pytest.approx(2 * UNIFORM_RING_RHS, rel=1e-12)
    assert uni2.margin / uni2.rhs_integral == pytest.approx(uni.margin / uni.rhs_integral, rel=1e-10)


def test_ring_inequality_log_map_is_sharp_for_log_eta():
    _, lg = proposition1_check(log_map(), 0j, 1, E)
    assert lg.passed
    assert lg.rhs_integral == pytest.approx(lg.lhs_modulus, rel=1e-10)


def test_ring_inequality_can_fail():
    f = power_map(2)
    (rep,) = proposition1_check(f, 0j, 1, E, etas=[eta_uniform(1, E)], Q=constant_field(1.0))
    assert not rep.passed
    assert rep.row()[-1] == 0


def test_ring_inequality_translated_center():
    f = power_map(2, 3 + 4j)
    reps = proposition1_check(f, 3 + 4j, 1, E)
    assert all(r.passed for r in reps)
    assert reps[0].rhs_integral == pytest.approx(2 * UNIFORM_RING_RHS, rel=1e-12)


def test_context_examples():
    ctx = dilatation_context(constant_field(1.0), 0j)
    assert ctx.C.delta == pytest.approx(0, abs=1e-13) and ctx.k0 == pytest.approx(1.0)
    assert ctx.C.value == pytest.approx(math.pi ** 3 / 3, rel=1e-12)
    ctx = dilatation_context(constant_field(4.0), 0j)
    assert ctx.C.value == pytest.approx(4 * math.pi ** 3 / 3, rel=1e-12)
    ctx = dilatation_context(dilatation_field(log_map()), 0j)
    assert ctx.k0 == pytest.approx(K0_LOG_MAP, rel=1e-10)
    assert ctx.C.delta > 0


def test_context_rejects_inconsistent_constant():
    with pytest.raises(ValueError):
        DilatationContext(0j, 1.0, growth_constant(0.0, 2.0))
    with pytest.raises(ValueError):
        DilatationContext.from_values(0.0, 0.5)


@given(st.floats(0, 1e3), st.floats(1, 1e3))
def test_exponent_never_exceeds_ceiling(delta, k0):
    ctx = DilatationContext.from_values(delta, k0)
    assert ctx.exponent <= EXPONENT_CEILING < 1


def test_chain_log_map_at_e4():
    f = log_map()
    ctx = dilatation_context(dilatation_field(f), 0j)
    c = capacity_chain(f, ctx, E ** 4)
    assert c.cap == pytest.approx(2 * math.pi / math.log(2.5), rel=1e-14)
    assert c.cap == pytest.approx(6.857, abs=1e-3)
    assert abs(c.cap - c.bound_area) <= 1e-12
    assert c.l_f == pytest.approx(2.0)
    assert ctx.C.value >= 16
    assert c.bound_growth >= 2.91
    assert c.passed


def test_chain_identity_passes():
    ctx = DilatationContext.from_values(0.0, 1.0)
    for R in exponent_grid(E + 0.01, 20, 10):
        assert capacity_chain(identity_map(), ctx, R).passed


def test_chain_violation_is_named():
    # a context claiming far too little dilatation breaks the log log bound
    ctx = DilatationContext.from_values(0.0, 1.0)
    c = capacity_chain(power_map(50), ctx, math.exp(3.0))
    assert "loglog-bound" in c.violations
    with pytest.raises(InequalityViolation) as info:
        capacity_chain(power_map(50), ctx, math.exp(3.0), strict=True)
    assert info.value.label == "loglog-bound"


def test_growth_report_log_map():
    f = log_map()
    ctx = dilatation_context(dilatation_field(f), 0j)
    rep = theorem1_report(f, ctx, exponent_grid(E + 0.1, 30, 24))
    assert rep.passed, rep.failures()
    assert rep.l_f == pytest.approx(2.0)
    assert np.all(rep.ratio >= 2.0)
    tail = rep.ratio[12:]
    assert rep.liminf_proxy == tail.min()
    assert len(rep.rows()) == 24 and all(np.all(np.isfinite(r)) for r in rep.rows())


def test_growth_report_translated_power_map():
    z0 = 3 + 4j
    f = power_map(2, z0)
    ctx = dilatation_context(dilatation_field(f), z0)
    rep = theorem1_report(f, ctx, exponent_grid(E + 1, 20, 10))
    assert rep.passed
    assert rep.l_f == pytest.approx(math.sqrt(E), rel=1e-14)


def test_growth_report_grid_validation():
    f = log_map()
    ctx = dilatation_context(dilatation_field(f), 0j)
    with pytest.raises(ValueError):
        theorem1_report(f, ctx, exponent_grid(E + 0.1, 30, 7))
    with pytest.raises(ValueError):
        theorem1_report(f, ctx, exponent_grid(E + 0.1, 30, 10)[::-1])


@given(st.lists(st.floats(E + 0.01, 40), min_size=8, max_size=12, unique=True))
def test_growth_report_arrays_aligned(exps):
    f = power_map(2)
    ctx = DilatationContext.from_values(0.0, 2.0)
    grid = np.exp(np.sort(exps))
    if np.any(np.diff(grid) <= 0):
        return
    rep = theorem1_report(f, ctx, grid)
    n = grid.size
    assert rep.ratio.shape == rep.max_on_circle.shape == (n,) and len(rep.chains) == n
    assert np.all(np.isfinite(rep.ratio))
    assert rep.liminf_proxy <= rep.ratio[n // 2:].min()


def test_audit_image_capacity_close_to_closed_form():
    rows = audit_image_capacity(log_map(), 0j, [math.exp(E + 0.1)], GridSpec(128))
    (R, exact, est, gap), = rows
    assert est >= exact and gap < 0.1
