import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import ramp_pair_sigma
from thermoweyl.errors import DivergentNorm
from thermoweyl.symplectic import (ThermalParams, check_norm, current_covariance,
                                   kms_kernel, pair_cross_factor, pair_exponent,
                                   sigma, sigma_momentum, sigma_step_limit,
                                   thermal_quadratic, thermal_quadratic_cutoff,
                                   thermal_weight, weyl_expectation)
from thermoweyl.testfn import (ZERO, Box, Constant, Gaussian, PolyGaussian, Ramp,
                               RampDiff, Step, reflect, shift)

G = Gaussian(0.0, 1.0)
XG = PolyGaussian((0.0, 1.0), 0.0, 1.0)

centers = st.floats(-2, 2)
widths = st.floats(0.4, 2.0)


@st.composite
def smooth_fn(draw):
    c, w = draw(centers), draw(widths)
    if draw(st.booleans()):
        return Gaussian(c, w)
    coeffs = tuple(draw(st.lists(st.floats(-1, 1), min_size=1, max_size=3)))
    return PolyGaussian(coeffs, c, w)


def test_gauss_xgauss_value(oracle):
    assert sigma(G, XG) == pytest.approx(oracle["sigma_gauss_xgauss"], abs=1e-13)
    assert sigma(G, XG) == pytest.approx(-1 / (4 * math.sqrt(2 * math.pi)), abs=1e-13)


def test_generic_pair_matches_oracle(oracle):
    val = sigma(Gaussian(0.3, 0.8), Gaussian(-0.4, 1.3))
    assert val == pytest.approx(oracle["sigma_gauss_pair"], abs=1e-12)


@given(f=smooth_fn(), g=smooth_fn())
def test_antisymmetry(f, g):
    assert abs(sigma(f, g) + sigma(g, f)) < 1e-12


@given(f=smooth_fn())
def test_self_pairing_vanishes(f):
    assert abs(sigma(f, f)) < 1e-12


@given(f=smooth_fn(), g=smooth_fn(), t=st.floats(-3, 3))
def test_translation_invariance(f, g, t):
    assert abs(sigma(shift(f, t), shift(g, t)) - sigma(f, g)) < 1e-11


@given(f=smooth_fn(), g=smooth_fn())
def test_parity_reverses_sign(f, g):
    assert abs(sigma(reflect(f), reflect(g)) + sigma(f, g)) < 1e-11


@given(f=smooth_fn(), g=smooth_fn())
def test_momentum_representation_agrees(f, g):
    assert abs(sigma_momentum(f, g) - sigma(f, g)) < 1e-9


@given(eps=st.floats(0.05, 3.0), t=st.floats(-6, 6))
def test_ramp_pair_closed_form(eps, t):
    # translation x -> phi(x + t) reproduces the closed form; the
    # right-translate shift(., t) carries the opposite sign
    ref = ramp_pair_sigma(eps, t)
    assert abs(sigma(Ramp(eps), shift(Ramp(eps), -t)) - ref) < 1e-12
    assert abs(sigma(Ramp(eps), shift(Ramp(eps), t)) + ref) < 1e-12


def test_jumps_enter_the_pairing():
    # Step against a Gaussian: (1/4pi) times boundary terms, -g(x0)/(2pi) in total
    val = sigma(Step(0.0), G)
    assert val == pytest.approx(-1.0 / (2 * math.pi), abs=1e-12)
    assert sigma(Box(-1.0, 1.0, 1.0), Box(-1.0, 1.0, 1.0)) == 0.0


def test_step_limit_matches_two_window_formula(oracle):
    assert sigma_step_limit(G, 5.0, 0.5) == pytest.approx(oracle["two_window_gauss_5_0.5"], abs=1e-12)
    assert sigma_step_limit(G, 50.0, 1e-3) == pytest.approx(oracle["two_window_gauss_50_1e-3"],
                                                            abs=1e-12)
    assert sigma_step_limit(G, 50.0, 1e-3) == pytest.approx(-1 / (2 * math.pi), abs=1e-6)


def test_step_limit_vanishes_for_odd_function():
    # the pre-limit is eps/(4 pi) at large delta
    assert sigma_step_limit(XG, 60.0, 1e-3) == pytest.approx(1e-3 / (4 * math.pi), rel=1e-6)
    assert abs(sigma_step_limit(XG, 60.0, 1e-7)) < 1e-8


@pytest.mark.parametrize("f", [G, PolyGaussian((1.0, 0.5), 0.2, 0.7)], ids=["gauss", "poly"])
def test_gauge_limit_is_first_order(f):
    x = 0.3
    target = float(f(x)) / (2 * math.pi)
    eps = np.array([1e-1, 1e-2, 1e-3, 1e-4])
    err = np.array([abs(sigma(f, shift(Ramp(e), x)) - target) for e in eps])
    slope = np.polyfit(np.log(eps), np.log(err), 1)[0]
    assert slope >= 0.9
    assert err[-1] < 1e-4


def test_thermal_weight_limits():
    assert thermal_weight(0.0, 2.0) == 0.5
    assert thermal_weight(50.0, 2.0) == pytest.approx(50.0)
    assert thermal_weight(-50.0, 2.0) == pytest.approx(50 * math.exp(-100), rel=1e-10)


def test_quadratic_form_matches_oracle(oracle):
    assert thermal_quadratic(G, ThermalParams(1.0)) == pytest.approx(
        oracle["quadratic_gauss_beta1"], rel=1e-8)
    assert thermal_quadratic(G, ThermalParams(math.pi)) == pytest.approx(
        oracle["quadratic_gauss_beta_pi"], rel=1e-8)


def test_quadratic_form_of_zero():
    assert thermal_quadratic(ZERO, ThermalParams(1.0)) == 0.0


@given(f=smooth_fn())
def test_quadratic_form_is_nonnegative(f):
    assert thermal_quadratic(f, ThermalParams(1.3)) >= 0.0


def test_rampdiff_norm_grows_with_delta():
    tp = ThermalParams(1.0)
    q = [thermal_quadratic(RampDiff(d, 1.0), tp) for d in (10.0, 20.0, 40.0)]
    assert q[0] < q[1] < q[2]


def test_divergent_norms():
    tp = ThermalParams(1.0)
    with pytest.raises(DivergentNorm):
        check_norm(Step(0.0), tp)
    with pytest.raises(DivergentNorm):
        check_norm(Constant(1.0), tp)
    with pytest.raises(DivergentNorm):
        check_norm(Box(0.0, 1.0, 1.0), tp)
    check_norm(RampDiff(2.0, 0.5), tp)


def test_cutoff_form_is_finite_for_steps():
    tp = ThermalParams(1.0)
    q1 = thermal_quadratic_cutoff(Box(0.0, 1.0, 1.0), tp, uv=50.0, ir=1e-3)
    q2 = thermal_quadratic_cutoff(Box(0.0, 1.0, 1.0), tp, uv=500.0, ir=1e-3)
    assert 0 < q1 < q2


def test_weyl_expectation_branches():
    tp = ThermalParams(1.0)
    assert weyl_expectation(ZERO, tp) == 1.0
    assert weyl_expectation(Step(0.0), tp) == 0.0
    vals = [weyl_expectation(RampDiff(d, 1.0), tp) for d in (5.0, 10.0, 20.0)]
    assert vals[0] > vals[1] > vals[2] > 0


def test_pair_factor_trivial_and_diagonal():
    tp = ThermalParams(1.0, 0.0)
    assert pair_cross_factor(ZERO, G, tp) == 1.0
    q = thermal_quadratic(G, tp)
    factor = pair_cross_factor(G, G, tp)
    assert factor.imag == pytest.approx(0.0, abs=1e-12)
    assert factor.real == pytest.approx(math.exp(q), rel=1e-9)
    # <e^{-ij}><e^{ij}> times the factor is the norm of a unitary
    assert weyl_expectation(G, tp) ** 2 * factor.real == pytest.approx(1.0, rel=1e-9)


def test_pair_factor_decouples_at_large_separation():
    tp = ThermalParams(1.0)
    near = abs(pair_cross_factor(G, Gaussian(2.0, 1.0), tp) - 1)
    far = abs(pair_cross_factor(G, Gaussian(40.0, 1.0), tp) - 1)
    assert far < near and far < 1e-3


def test_pair_exponent_imaginary_part_is_half_sigma():
    tp = ThermalParams(2.0, 0.0)
    f, g = Gaussian(0.3, 0.8), Gaussian(-0.4, 1.3)
    # omega(j_f j_g) - omega(j_g j_f) = i sigma(f, g)
    diff = pair_exponent(f, g, tp) - pair_exponent(g, f, tp)
    assert diff.real == pytest.approx(0.0, abs=1e-10)
    assert diff.imag == pytest.approx(sigma(f, g), abs=1e-9)


def test_covariance_routes_agree_with_oracle(oracle):
    tp = ThermalParams(math.pi, 1e-4)
    ref = complex(*oracle["covariance_gauss_beta_pi_eps1e-4"])
    pos = current_covariance(G, G, tp).value
    mom = current_covariance(G, G, tp, method="momentum_quadrature").value
    assert abs(pos - ref) < 1e-9
    assert abs(mom - ref) < 1e-9
    assert abs(mom - pair_exponent(G, G, tp)) < 1e-6


def test_covariance_of_zero():
    assert current_covariance(ZERO, G, ThermalParams(1.0)).value == 0


def test_covariance_report_json():
    rep = current_covariance(G, XG, ThermalParams(1.0, 1e-3))
    assert '"method": "position_kernel"' in rep.to_json()


def test_kernel_vacuum_limit():
    u = np.array([0.5, 1.0, 2.0])
    k = kms_kernel(u, ThermalParams(1e5, 1e-9))
    assert np.allclose(k, -1 / (4 * math.pi**2 * u**2), rtol=1e-6)


def test_thermal_params_validation():
    with pytest.raises(ValueError):
        ThermalParams(0.0)
    with pytest.raises(ValueError):
        ThermalParams(1.0, -1.0)
