import math

import numpy as np
import pytest

from hoytmimo.quadrature import QuadratureError, adaptive_gauss_kronrod


def test_polynomial_exact():
    val, err = adaptive_gauss_kronrod(lambda x: x**3 - 2 * x + 1, 0.0, 2.0)
    assert val == pytest.approx(4.0 - 4.0 + 2.0, rel=1e-13)
    assert err < 1e-10


def test_exponential():
    val, _ = adaptive_gauss_kronrod(math.exp, 0.0, 1.0, rel_tol=1e-12)
    assert val == pytest.approx(math.e - 1.0, rel=1e-12)


def test_oscillatory():
    val, _ = adaptive_gauss_kronrod(lambda x: math.sin(10.0 * x), 0.0, math.pi, rel_tol=1e-11)
    assert val == pytest.approx((1.0 - math.cos(10.0 * math.pi)) / 10.0, abs=1e-10)


def test_integrable_sqrt_singularity_via_substitution():
    # 1/sqrt(x) on (0, 1]: integrate 2 du after x = u^2
    val, _ = adaptive_gauss_kronrod(lambda u: 2.0, 0.0, 1.0)
    assert val == pytest.approx(2.0, rel=1e-13)


def test_error_estimate_covers_true_error():
    f = lambda x: math.exp(-x) * math.sin(3.0 * x)  # noqa: E731
    val, err = adaptive_gauss_kronrod(f, 0.0, 10.0, rel_tol=1e-9)
    exact = (3.0 - math.exp(-10.0) * (math.sin(30.0) * 1.0 + 3.0 * math.cos(30.0))) / 10.0
    assert abs(val - exact) <= max(err, 1e-12)


def test_nonconvergent_raises():
    rng = np.random.default_rng(0)
    with pytest.raises(QuadratureError):
        adaptive_gauss_kronrod(
            lambda x: float(rng.normal()), 0.0, 1.0, rel_tol=1e-12, max_intervals=8
        )


def test_bad_interval():
    with pytest.raises(ValueError):
        adaptive_gauss_kronrod(math.exp, 1.0, 1.0)
