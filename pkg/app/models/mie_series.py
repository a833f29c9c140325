# app/models/mie_series.py
"""Separation of variables for a ball of constant contrast (cylinder in 2D, sphere in 3D).

Per angular mode m the incident wave alpha_m J_m(k r) is matched at r = R to
an interior c_m J_m(k1 r) and an outgoing a_m H_m(k r), k1 = k sqrt(1 + v0).
The scattering coefficient is a_m = -alpha_m d_m(k) / D_m(k), where d_m is the
transmission determinant, so transmission eigenvalues are exactly the
wavenumbers at which mode m does not scatter.
"""
import math

import numpy as np
from scipy.special import eval_legendre

from app.models.specfun import (bessel_j, bessel_j_prime, hankel1, hankel1_prime, spherical_h1,
                                spherical_j)
from app.utils.errors import ConfigError


def radial_function(n, m, x, kind, derivative=False):
    m = abs(int(m))
    if n == 2:
        if kind == "j":
            return bessel_j_prime(m, x) if derivative else bessel_j(m, x)
        return hankel1_prime(m, x) if derivative else hankel1(m, x)
    if kind == "j":
        return spherical_j(m, x, derivative)
    return spherical_h1(m, x, derivative)


def _parity(n, m):
    # J_{-m} = (-1)^m J_m and likewise for H; 3D zonal modes are never negative
    return (-1.0) ** m if n == 2 and m < 0 else 1.0


def mode_determinants(k, R, v0, n, m):
    """(d_m, D_m): transmission determinant and the outgoing matching determinant."""
    k1 = k * math.sqrt(1.0 + v0)
    jk, djk = radial_function(n, m, k * R, "j"), radial_function(n, m, k * R, "j", True)
    j1, dj1 = radial_function(n, m, k1 * R, "j"), radial_function(n, m, k1 * R, "j", True)
    hk, dhk = radial_function(n, m, k * R, "h"), radial_function(n, m, k * R, "h", True)
    d = jk * k1 * dj1 - k * djk * j1
    D = hk * k1 * dj1 - k * dhk * j1
    return complex(d), complex(D)


def series_order(k, R, v0):
    x = k * R * max(1.0, math.sqrt(1.0 + v0))
    return int(x + 4.05 * x ** (1.0 / 3.0) + 2.0) + 8


class ModalIncidence:
    """sum_m alpha_m J_m(k r) e^{i m theta} (2D) or sum_l alpha_l j_l(k r) P_l(xhat . axis) (3D)."""

    def __init__(self, n, amplitudes, axis=None):
        if n not in (2, 3):
            raise ConfigError("modal incidence is implemented for n in {2, 3}")
        self.n = n
        self.amplitudes = {int(m): complex(a) for m, a in amplitudes.items()}
        if n == 3 and any(m < 0 for m in self.amplitudes):
            raise ConfigError("3D zonal modes have non-negative degree")
        axis = np.eye(n)[-1] if axis is None else np.asarray(axis, dtype=float)
        self.axis = axis / np.linalg.norm(axis)

    @classmethod
    def plane_wave(cls, direction, order):
        direction = np.asarray(direction, dtype=float)
        direction = direction / np.linalg.norm(direction)
        if direction.size == 2:
            theta0 = math.atan2(direction[1], direction[0])
            return cls(2, {m: 1j ** m * np.exp(-1j * m * theta0) for m in range(-order, order + 1)})
        return cls(3, {l: (2 * l + 1) * 1j ** l for l in range(order + 1)}, axis=direction)

    @classmethod
    def herglotz_mode(cls, n, m, axis=None):
        """Incident field of the density e^{i m theta} (2D) or P_m(d . axis) (3D)."""
        if n == 2:
            return cls(2, {m: 2.0 * math.pi * 1j ** m})
        return cls(3, {m: 4.0 * math.pi * 1j ** m}, axis=axis)

    def angular(self, m, points):
        if self.n == 2:
            return np.exp(1j * m * np.arctan2(points[:, 1], points[:, 0]))
        r = np.linalg.norm(points, axis=1)
        cos_gamma = np.divide(points @ self.axis, r, out=np.ones_like(r), where=r > 0)
        return eval_legendre(m, cos_gamma)

    def angular_far(self, m, directions):
        if self.n == 2:
            return np.exp(1j * m * np.arctan2(directions[:, 1], directions[:, 0]))
        return eval_legendre(m, directions @ self.axis)

    def __call__(self, k, points):
        points = np.atleast_2d(points)
        r = np.linalg.norm(points, axis=1)
        total = np.zeros(points.shape[0], dtype=complex)
        for m, alpha in sorted(self.amplitudes.items()):
            total += alpha * _parity(self.n, m) * radial_function(self.n, m, k * r, "j") * self.angular(m, points)
        return total


class RadialScatterer:
    def __init__(self, k, radius, contrast, n, center=None, order=None):
        if k <= 0 or radius <= 0:
            raise ConfigError("series solution needs k > 0 and R > 0")
        if 1.0 + contrast <= 0:
            raise ConfigError("refractive index 1 + v0 must be positive")
        if n not in (2, 3):
            raise ConfigError("series solution is implemented for n in {2, 3}")
        self.k, self.radius, self.contrast, self.n = float(k), float(radius), float(contrast), n
        self.center = np.zeros(n) if center is None else np.asarray(center, dtype=float)
        self.order = order or series_order(self.k, self.radius, self.contrast)
        self.k1 = self.k * math.sqrt(1.0 + self.contrast)
        self._coefficients = {}

    def coefficients(self, m):
        """(interior c_m, scattered a_m) per unit incident amplitude."""
        key = abs(int(m))
        if key not in self._coefficients:
            d, D = mode_determinants(self.k, self.radius, self.contrast, self.n, key)
            kR = self.k * self.radius
            jk, djk = radial_function(self.n, key, kR, "j"), radial_function(self.n, key, kR, "j", True)
            hk, dhk = radial_function(self.n, key, kR, "h"), radial_function(self.n, key, kR, "h", True)
            interior = self.k * (hk * djk - jk * dhk) / D
            self._coefficients[key] = (complex(interior), -d / D)
        return self._coefficients[key]

    def _modes(self, incidence):
        for m, alpha in sorted(incidence.amplitudes.items()):
            if abs(m) <= self.order:
                yield m, alpha

    def total_field(self, points, incidence):
        points = np.atleast_2d(points)
        local = points - self.center
        r = np.linalg.norm(local, axis=1)
        inside = r < self.radius
        out = np.zeros(local.shape[0], dtype=complex)
        if (~inside).any():
            out[~inside] = incidence(self.k, local[~inside]) + self.scattered_field(points[~inside], incidence)
        for m, alpha in self._modes(incidence):
            interior, _ = self.coefficients(m)
            radial = _parity(self.n, m) * radial_function(self.n, m, self.k1 * r[inside], "j")
            out[inside] += alpha * interior * radial * incidence.angular(m, local[inside])
        return out

    def scattered_field(self, points, incidence):
        """Outgoing part, valid for |x - center| >= R."""
        local = np.atleast_2d(points) - self.center
        r = np.linalg.norm(local, axis=1)
        if np.any(r < self.radius * (1 - 1e-12)):
            raise ConfigError("the outgoing expansion is only valid outside the ball")
        out = np.zeros(local.shape[0], dtype=complex)
        for m, alpha in self._modes(incidence):
            _, a = self.coefficients(m)
            radial = _parity(self.n, m) * radial_function(self.n, m, self.k * r, "h")
            out += alpha * a * radial * incidence.angular(m, local)
        return out

    def far_field(self, directions, incidence):
        directions = np.atleast_2d(directions)
        shift = np.exp(-1j * self.k * (directions @ self.center))
        out = np.zeros(directions.shape[0], dtype=complex)
        for m, alpha in self._modes(incidence):
            _, a = self.coefficients(m)
            if self.n == 2:
                factor = math.sqrt(2.0 / (math.pi * self.k)) * np.exp(-0.25j * math.pi) * (-1j) ** m
            else:
                factor = (-1j) ** (m + 1) / self.k
            out += alpha * a * factor * incidence.angular_far(m, directions)
        return shift * out
