import math

import numpy as np
import pytest
from scipy.integrate import quad

from app.models.specfun import (bessel_j, bessel_j_prime, bessel_y, bessel_y_prime, bessel_zero, gamma_fn,
                                hankel1, lower_incomplete_gamma, sphere_measure, spherical_h1, spherical_j)
from app.utils.errors import DomainError


def test_bessel_j_at_origin():
    assert bessel_j(0, 0.0) == pytest.approx(1.0), "J0(0) should be 1"
    assert bessel_j(1, 0.0) == pytest.approx(0.0, abs=1e-15), "J1(0) should vanish"


def test_bessel_j_first_zero_of_j1():
    assert abs(bessel_j(1, 3.8317059702)) < 1e-9, "3.8317059702 is the first zero of J1"


def test_bessel_zero_bracketing_matches_known_roots():
    assert bessel_zero(1, 1) == pytest.approx(3.8317059702075123, abs=1e-12), "first zero of J1"
    assert bessel_zero(1, 2) == pytest.approx(7.015586669815619, abs=1e-12), "second zero of J1"
    assert bessel_zero(0, 1) == pytest.approx(2.404825557695773, abs=1e-12), "first zero of J0"


def test_hankel_half_order_closed_form():
    x = math.pi
    expected = -1j * math.sqrt(2.0 / (math.pi * x)) * np.exp(1j * x)
    assert abs(hankel1(0.5, x) - expected) < 1e-12, f"H_1/2(pi) = {hankel1(0.5, x)}, expected {expected}"


def test_hankel_real_part_is_bessel_j():
    assert abs(hankel1(0, 1.0).real - bessel_j(0, 1.0)) < 1e-12, "Re H0(1) should equal J0(1)"
    assert abs(hankel1(0, 1.0).imag - bessel_y(0, 1.0)) < 1e-12, "Im H0(1) should equal Y0(1)"


def test_hankel_diverges_at_origin():
    values = [abs(hankel1(0, x)) for x in (1e-2, 1e-4, 1e-8)]
    assert values[0] < values[1] < values[2], f"|H0| should grow towards 0, got {values}"


def test_singular_functions_reject_nonpositive_arguments():
    for fn in (lambda: hankel1(0, 0.0), lambda: bessel_y(1, -1.0), lambda: spherical_h1(0, 0.0)):
        with pytest.raises(DomainError):
            fn()


def test_negative_order_is_rejected():
    with pytest.raises(DomainError):
        bessel_j(-1, 1.0)


def test_wronskian_identity():
    x = np.linspace(0.1, 50.0, 400)
    for nu in (0, 1, 2.5):
        w = bessel_j(nu, x) * bessel_y_prime(nu, x) - bessel_j_prime(nu, x) * bessel_y(nu, x)
        error = np.max(np.abs(w - 2.0 / (np.pi * x)) * x)
        assert error < 1e-9, f"Wronskian off by {error:.2e} (scaled) for order {nu}"


def test_spherical_bessel_matches_half_integer_order():
    x = np.linspace(0.5, 20.0, 50)
    expected = np.sqrt(np.pi / (2.0 * x)) * bessel_j(2.5, x)
    assert np.allclose(spherical_j(2, x), expected, atol=1e-13), "j_2 should equal sqrt(pi/2x) J_{5/2}"


def test_lower_incomplete_gamma_values():
    assert lower_incomplete_gamma(0.0, 2.5) == 0.0, "empty integral"
    assert lower_incomplete_gamma(5.0, 1.0) == pytest.approx(1.0 - math.exp(-5.0), rel=1e-14), "a=1 closed form"
    reference, _ = quad(lambda t: math.exp(-t) * t ** 0.5, 0.0, 2.0, epsabs=1e-14, epsrel=1e-14)
    assert lower_incomplete_gamma(2.0, 1.5) == pytest.approx(reference, abs=1e-10), "quadrature of the integral"


def test_lower_incomplete_gamma_saturates():
    for a in (0.5, 1.0, 2.0, 3.0):
        assert abs(lower_incomplete_gamma(50.0, a) - gamma_fn(a)) < 1e-12, f"gamma(50, {a}) should reach Gamma"


def test_lower_incomplete_gamma_is_monotone():
    values = lower_incomplete_gamma(np.linspace(0.0, 10.0, 101), 1.5)
    assert np.all(np.diff(values) >= 0), "gamma(x, a) should not decrease in x"


def test_gamma_function():
    assert gamma_fn(1.0) == pytest.approx(1.0)
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma_fn(2.5) == pytest.approx(1.5 * 0.5 * math.sqrt(math.pi), rel=1e-14)
    with pytest.raises(DomainError):
        gamma_fn(0.0)


def test_sphere_measure():
    assert sphere_measure(0) == pytest.approx(2.0), "S^0 is two points"
    assert sphere_measure(1) == pytest.approx(2.0 * math.pi), "circle"
    assert sphere_measure(2) == pytest.approx(4.0 * math.pi), "sphere"
