# app/models/specfun.py
import math

import numpy as np
from scipy import special
from scipy.optimize import brentq

from app.utils.errors import DomainError


def _check_order(nu):
    if not np.isfinite(nu) or nu < 0:
        raise DomainError(f"Bessel order must be finite and non-negative, got {nu}")


def bessel_j(nu, x):
    _check_order(nu)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("bessel_j is defined here for x >= 0 only")
    return special.jv(nu, x)


def bessel_y(nu, x):
    _check_order(nu)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("bessel_y requires x > 0")
    return special.yv(nu, x)


def hankel1(nu, x):
    _check_order(nu)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("hankel1 is singular at x <= 0")
    return special.hankel1(nu, x)


def bessel_j_prime(nu, x):
    return special.jvp(nu, np.asarray(x, dtype=float))


def hankel1_prime(nu, x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("hankel1_prime requires x > 0")
    return special.h1vp(nu, x)


def bessel_y_prime(nu, x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("bessel_y_prime requires x > 0")
    return special.yvp(nu, x)


def spherical_j(m, x, derivative=False):
    return special.spherical_jn(int(m), np.asarray(x, dtype=float), derivative=derivative)


def spherical_h1(m, x, derivative=False):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("spherical_h1 requires x > 0")
    return (special.spherical_jn(int(m), x, derivative=derivative)
            + 1j * special.spherical_yn(int(m), x, derivative=derivative))


def gamma_fn(a):
    if a <= 0:
        raise DomainError(f"gamma_fn requires a > 0, got {a}")
    return math.gamma(a)


def lower_incomplete_gamma(x, a):
    """gamma(x, a) = int_0^x e^{-t} t^{a-1} dt (argument order follows the closed forms)."""
    if a <= 0:
        raise DomainError(f"lower_incomplete_gamma requires a > 0, got {a}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("lower_incomplete_gamma requires x >= 0")
    value = special.gammainc(a, x) * math.gamma(a)
    return float(value) if value.ndim == 0 else value


def sphere_measure(d):
    """Surface measure of the unit sphere S^d in R^{d+1}."""
    if d < 0:
        raise DomainError("sphere dimension must be non-negative")
    return 2.0 * math.pi ** ((d + 1) / 2.0) / math.gamma((d + 1) / 2.0)


def bessel_zero(nu, index, step=0.05):
    """index-th positive zero of J_nu by sign-change bracketing and brentq."""
    if index < 1:
        raise DomainError("zero index starts at 1")
    _check_order(nu)
    found = 0
    a = step
    fa = special.jv(nu, a)
    while True:
        b = a + step
        fb = special.jv(nu, b)
        if fa == 0.0:
            found += 1
            if found == index:
                return a
        elif fa * fb < 0:
            found += 1
            if found == index:
                return brentq(lambda t: special.jv(nu, t), a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        a, fa = b, fb
