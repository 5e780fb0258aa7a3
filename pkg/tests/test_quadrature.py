import math

import numpy as np
import pytest
from scipy import integrate

from fraclap.quadrature import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, adaptive_gk, adaptive_gk_log, integrate_to_zero


def test_rule_weights_integrate_constants():
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-14)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-14)
    # the Kronrod rule is exact for degree 22 on [-1, 1]
    assert KRONROD_WEIGHTS @ NODES ** 22 == pytest.approx(2.0 / 23.0, rel=1e-13)


def test_smooth_integral_against_scipy():
    res = adaptive_gk(np.cos, 0.0, 10.0, rel_tol=1e-12)
    assert res.converged
    assert res.value == pytest.approx(math.sin(10.0), abs=1e-12)


def test_log_variable_integral():
    res = adaptive_gk_log(lambda x: 1.0 / x, 1e-3, 1e3, rel_tol=1e-12)
    assert res.value == pytest.approx(math.log(1e6), rel=1e-12)


def test_integrate_to_zero_against_scipy():
    f = lambda x: x ** -0.9 * np.cos(x)
    ref, _ = integrate.quad(lambda x: x ** -0.9 * math.cos(x), 0.0, 1.0, limit=200)
    res = integrate_to_zero(f, 1.0, 0.1, rel_tol=1e-12, chunk=16.0)
    assert res.converged
    assert res.value == pytest.approx(ref, rel=1e-10)


def test_integrate_to_zero_rejects_nonintegrable():
    with pytest.raises(ValueError):
        integrate_to_zero(lambda x: 1.0 / x, 1.0, 0.0)


def test_nonfinite_integrand_is_reported():
    with pytest.raises(FloatingPointError):
        adaptive_gk(lambda x: np.where(x > 0.5, np.inf, 1.0), 0.0, 1.0)


def test_budget_exhaustion_reported():
    res = adaptive_gk(lambda x: np.sin(1.0 / (x + 1e-4)), 0.0, 1.0, rel_tol=1e-14, max_panels=20)
    assert not res.converged
    assert res.panels <= 40
