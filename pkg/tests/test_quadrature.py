import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from thermoweyl.errors import QuadratureFailure
from thermoweyl.quadrature import (fixed_gauss, integrate, oscillation_edges,
                                   panel_integrate, richardson)


@given(coeffs=st.lists(st.floats(-3, 3), min_size=1, max_size=20))
def test_fixed_gauss_is_exact_for_polynomials(coeffs):
    poly = np.polynomial.Polynomial(coeffs)
    exact = poly.integ()(2.0) - poly.integ()(-1.0)
    assert fixed_gauss(poly, -1.0, 2.0, n=12) == pytest.approx(exact, rel=1e-12, abs=1e-11)


def test_integrate_semi_infinite_and_complex():
    val, _ = integrate(lambda x: math.exp(-x * x), -np.inf, np.inf)
    assert val == pytest.approx(math.sqrt(math.pi), rel=1e-12)
    val, _ = integrate(lambda x: np.exp(1j * x) * math.exp(-x * x), -np.inf, np.inf,
                       complex_func=True)
    assert abs(val - math.sqrt(math.pi) * math.exp(-0.25)) < 1e-12


def test_panel_integrate_oscillatory():
    p = 40.0
    edges = oscillation_edges(-9.0, 9.0, p)
    val, err = panel_integrate(lambda x: np.cos(p * x) * np.exp(-x * x), edges)
    assert val == pytest.approx(math.sqrt(math.pi) * math.exp(-p * p / 4), abs=1e-12)
    assert err < 1e-10


def test_panel_integrate_reports_failure():
    with pytest.raises(QuadratureFailure):
        panel_integrate(lambda x: 1.0 / np.abs(x - 0.3), [0.0, 1.0], max_rounds=3)


def test_richardson_removes_leading_order():
    steps = [0.1, 0.05, 0.025]
    values = [2.0 + 3.0 * h + 0.5 * h * h for h in steps]
    limit, resid = richardson(values, steps, order=1.0)
    assert abs(limit - 2.0) < 1e-3
    assert resid < 1e-2
