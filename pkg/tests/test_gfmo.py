import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from beltrami_growth.fields import dilatation_field, log_map, power_map
from beltrami_growth.gfmo import (E_E, abs_field, constant_field, default_dispersion_grid, dispersion_sup,
                                  exponent_grid, gfmo_evidence, growth_constant, lemma2_check, lemma2_lhs,
                                  lemma2_shell_decomposition, log_plus_field, mean_abs_deviation_from,
                                  mean_deviation, mean_over_disk, named_field, two_level_field)
from beltrami_growth.geometry import ScalarField

# 2 int_0^1 |log t + 1/2| t dt, the large-R deviation of log+|z|; oracle is adaptive 1-D quadrature
_tc = math.exp(-0.5)
LOGPLUS_DEVIATION_LIMIT = (integrate.quad(lambda t: -2 * t * (math.log(t) + 0.5), 0, _tc, epsabs=1e-15)[0]
                           + integrate.quad(lambda t: 2 * t * (math.log(t) + 0.5), _tc, 1, epsabs=1e-15)[0])
K0_LOG_MAP = (3 * math.e ** 2 + 1) / (2 * math.e ** 2)


def test_deviation_limit_oracle_is_one_over_e():
    assert LOGPLUS_DEVIATION_LIMIT == pytest.approx(1 / math.e, abs=1e-12)


@pytest.mark.parametrize("R", [0.5, 3.0, 1e4])
def test_constant_field_mean_and_deviation(R):
    phi = constant_field(2.5)
    assert mean_over_disk(phi, 0j, R) == pytest.approx(2.5, rel=1e-14)
    assert mean_deviation(phi, 0j, R) == pytest.approx(0.0, abs=1e-13)


@pytest.mark.parametrize("R", [1.5, math.e, 50.0, 1e6])
def test_log_plus_mean_closed_form(R):
    expected = math.log(R) - 0.5 + 1 / (2 * R ** 2)
    assert mean_over_disk(log_plus_field(), 0j, R) == pytest.approx(expected, abs=1e-6)


def test_k0_of_log_map():
    assert mean_over_disk(dilatation_field(log_map()), 0j, math.e) == pytest.approx(K0_LOG_MAP, rel=1e-10)


def test_log_plus_deviation_tends_to_limit():
    assert mean_deviation(log_plus_field(), 0j, 1e8) == pytest.approx(LOGPLUS_DEVIATION_LIMIT, rel=1e-6)


@pytest.mark.parametrize("a, b", [(1.0, 3.0), (5.0, 0.0), (2.0, 2.5)])
def test_two_level_field_deviation(a, b):
    R = 7.0
    phi = two_level_field(a, b, R / math.sqrt(2))
    assert mean_deviation(phi, 0j, R) == pytest.approx(abs(a - b) / 2, rel=1e-12)


@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(1.5, 1e4))
def test_deviation_translation_invariant(x, y, R):
    z0 = complex(x, y)
    a = mean_deviation(log_plus_field(z0), z0, R)
    b = mean_deviation(log_plus_field(), 0j, R)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-14)


@given(st.floats(0.1, 10.0), st.floats(-5.0, 5.0), st.floats(1.5, 1e3))
def test_deviation_scales_with_field_and_ignores_shift(c, shift, R):
    phi = log_plus_field()
    base = mean_deviation(phi, 0j, R)
    assert mean_deviation(c * phi + shift, 0j, R) == pytest.approx(c * base, rel=1e-9, abs=1e-13)


@given(st.floats(1.5, 1e4))
def test_deviation_nonnegative_and_bounded_by_twice_mean_abs(R):
    phi = log_plus_field()
    dev = mean_deviation(phi, 0j, R)
    assert 0 <= dev <= 2 * mean_over_disk(phi, 0j, R) + 1e-12


def test_non_radial_field_deviation_matches_radial_path():
    phi = log_plus_field()
    flat = ScalarField(lambda z: phi(z))
    assert mean_over_disk(flat, 0j, 20.0) == pytest.approx(mean_over_disk(phi, 0j, 20.0), rel=1e-6)


def test_dispersion_constant_field():
    rep = dispersion_sup(constant_field(1.0), 0j)
    assert rep.delta_inf_hat == pytest.approx(0.0, abs=1e-13)
    assert rep.phi_0 == pytest.approx(1.0, rel=1e-14)
    assert rep.stabilizing


def test_dispersion_log_plus_is_flat():
    grid = np.exp(math.e + 0.01 + np.arange(9) / 2)
    rep = dispersion_sup(log_plus_field(), 0j, grid)
    d = rep.mean_deviations
    assert np.isfinite(rep.delta_inf_hat)
    assert d.max() <= 1.05 * d.min()
    assert rep.stabilizing


def test_dispersion_of_abs_field_is_flagged():
    grid = np.exp(math.e + 0.01 + np.arange(9) / 2)
    rep = dispersion_sup(abs_field(), 0j, grid)
    assert not rep.stabilizing
    # mean of |z| over B(0, R) is 2R/3
    assert rep.mean_values[-1] == pytest.approx(2 * grid[-1] / 3, rel=1e-12)


@pytest.mark.parametrize("grid", [[], [10.0, 20.0], [E_E]])
def test_dispersion_grid_validation(grid):
    with pytest.raises(ValueError):
        dispersion_sup(constant_field(1.0), 0j, grid)


def test_default_dispersion_grid_shape():
    g = default_dispersion_grid()
    assert g.size == 13 and g[0] > E_E


def test_evidence_flags():
    ev = gfmo_evidence(constant_field(5.0), 0j)
    assert ev.oscillation_bounded and ev.about_center_value_bounded and ev.mean_abs_bounded
    ev = gfmo_evidence(log_plus_field(), 0j)
    assert ev.oscillation_bounded
    assert not ev.mean_abs_bounded
    ev = gfmo_evidence(abs_field(), 0j)
    assert not (ev.oscillation_bounded or ev.about_center_value_bounded or ev.mean_abs_bounded)


def test_growth_constant_examples():
    assert growth_constant(0, 1).value == pytest.approx(math.pi ** 3 / 3, rel=1e-15)
    assert growth_constant(1, 0).value == pytest.approx(math.pi / 6 * (24 + math.pi ** 2) * math.e ** 2, rel=1e-15)
    assert growth_constant(1, 0).value == pytest.approx(131.04, abs=0.01)
    c = growth_constant(0, 0)
    assert c.degenerate and math.isinf(c.exponent)
    with pytest.raises(ValueError):
        growth_constant(-1, 1)


@given(st.floats(0, 1e3), st.floats(0, 1e3), st.floats(0, 1e3))
def test_growth_constant_monotone(delta, phi0, bump):
    assert growth_constant(delta + bump, phi0).value >= growth_constant(delta, phi0).value
    assert growth_constant(delta, phi0 + bump).value >= growth_constant(delta, phi0).value


def test_weighted_integral_examples():
    assert lemma2_lhs(constant_field(1.0), 0j, E_E * (1 + 1e-15)) == pytest.approx(2 * math.pi * (1 - 1 / math.e), rel=1e-10)
    assert lemma2_lhs(log_plus_field(), 0j, math.e ** 4) == pytest.approx(2 * math.pi * math.log(4), rel=1e-10)
    with pytest.raises(ValueError):
        lemma2_lhs(constant_field(1.0), 0j, 10.0)


@given(st.floats(E_E * 1.001, 1e12), st.floats(1.001, 100.0))
def test_weighted_integral_monotone_and_below_two_pi(R, ratio):
    phi = constant_field(1.0)
    a, b = lemma2_lhs(phi, 0j, R), lemma2_lhs(phi, 0j, R * ratio)
    assert a <= b <= 2 * math.pi
    assert a == pytest.approx(2 * math.pi * (1 - 1 / math.log(R)), rel=1e-7)


def test_shell_integral_bound_for_constant_field():
    rep = lemma2_check(constant_field(1.0), 0j, exponent_grid(math.e + 0.01, 10, 12))
    assert rep.all_pass
    assert rep.margin.min() >= math.pi ** 3 / 3 - 2 * math.pi - 1e-9


def test_shell_integral_bound_for_constant_three():
    K = dilatation_field(power_map(3))
    rep = lemma2_check(K, 0j, exponent_grid(math.e + 0.01, 10, 6))
    assert rep.all_pass
    assert rep.constant.value == pytest.approx(math.pi ** 3, rel=1e-9)
    assert rep.lhs.max() <= 6 * math.pi


def test_shell_integral_bound_for_log_plus():
    rep = lemma2_check(log_plus_field(), 0j, exponent_grid(math.e + 0.01, 10, 12))
    assert rep.all_pass and np.all(rep.margin > 0)
    assert not rep.failures()


def test_shell_integral_failure_is_reported():
    rep = lemma2_check(constant_field(1.0), 0j, exponent_grid(math.e + 0.01, 10, 4))
    rep.passed[1] = False
    assert len(rep.failures()) == 1 and "R=" in rep.failures()[0]


def test_shell_decomposition_constant_field():
    rep = lemma2_shell_decomposition(constant_field(1.0), 0j, math.e ** 5)
    assert rep.N == 5
    assert np.allclose(rep.s1_terms, 0.0, atol=1e-13)
    assert np.allclose(rep.shell_means, 1.0)
    assert rep.all_pass


def test_shell_decomposition_log_plus():
    rep = lemma2_shell_decomposition(log_plus_field(), 0j, math.e ** 5)
    assert rep.N == 5
    disp = dispersion_sup(log_plus_field(), 0j, np.union1d(default_dispersion_grid(), np.exp(np.arange(1, 7))[2:]))
    jumps = np.abs(np.diff(rep.shell_means))
    assert np.all(jumps <= math.e ** 2 * disp.delta_inf_hat)
    assert rep.all_pass, [k for k, v in rep.checks.items() if not v]


def test_named_fields():
    assert named_field("const:2")(np.array([5j]))[0] == 2.0
    assert named_field("logplus").is_radial_about(0j)
    with pytest.raises(ValueError):
        named_field("const:-1")
    with pytest.raises(ValueError):
        named_field("sine")


@given(st.lists(st.floats(math.e + 0.01, 30.0), min_size=1, max_size=6), st.floats(math.e + 0.01, 30.0))
def test_dispersion_estimate_grows_with_grid(exps, extra):
    phi = two_level_field(1.0, 4.0, 100.0)
    small = np.exp(np.array(exps))
    a = dispersion_sup(phi, 0j, small).delta_inf_hat
    b = dispersion_sup(phi, 0j, np.union1d(small, [math.exp(extra)])).delta_inf_hat
    assert b >= a


@given(st.floats(1.5, 1e3), st.floats(-3.0, 10.0), st.sampled_from(["logplus", "abs", "two-level"]))
def test_deviation_at_most_twice_distance_to_any_level(R, level, kind):
    phi = {"logplus": log_plus_field(), "abs": abs_field(), "two-level": two_level_field(0.0, 5.0, 2.0)}[kind]
    assert mean_deviation(phi, 0j, R) <= 2 * mean_abs_deviation_from(phi, 0j, R, level) * (1 + 1e-9) + 1e-12
