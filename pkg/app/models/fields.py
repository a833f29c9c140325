# app/models/fields.py
"""Test fields with closed-form derivatives.

Harmonic fields (u0 with Delta u0 = 0) test Green identities; manufactured
fields vanish to second order on part of a boundary and come with the source
phi = (Delta + k^2) w, either exact or through the grid stencil.
"""
import numpy as np

from app.models.cgo import CgoVector


class Field:
    def __call__(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def laplacian(self, x):
        raise NotImplementedError

    def source(self, k, spacing=None):
        """phi = (Delta + k^2) w; with a spacing, Delta is the three-point stencil of that step."""
        if spacing is None:
            return lambda x: self.laplacian(np.atleast_2d(x)) + k * k * self(np.atleast_2d(x))

        def stencil(x):
            x = np.atleast_2d(x)
            centre = self(x)
            lap = np.zeros(x.shape[0], dtype=complex)
            for i in range(x.shape[1]):
                step = np.zeros(x.shape[1])
                step[i] = spacing
                lap += self(x + step) - 2.0 * centre + self(x - step)
            return lap / (spacing * spacing) + k * k * centre
        return stencil


class ZeroField(Field):
    def __call__(self, x):
        return np.zeros(np.atleast_2d(x).shape[0], dtype=complex)

    def gradient(self, x):
        return np.zeros(np.atleast_2d(x).shape, dtype=complex)

    def laplacian(self, x):
        return self(x)


class ConstantField(Field):
    def __init__(self, value=1.0):
        self.value = complex(value)

    def __call__(self, x):
        return np.full(np.atleast_2d(x).shape[0], self.value)

    def gradient(self, x):
        return np.zeros(np.atleast_2d(x).shape, dtype=complex)

    def laplacian(self, x):
        return np.zeros(np.atleast_2d(x).shape[0], dtype=complex)


class CgoField(Field):
    def __init__(self, rho):
        self.rho = rho if isinstance(rho, CgoVector) else CgoVector(rho, float(-np.real(rho[-1])))

    def __call__(self, x):
        return self.rho(x)

    def gradient(self, x):
        return self.rho.gradient(x)

    def laplacian(self, x):
        return np.zeros(np.atleast_2d(x).shape[0], dtype=complex)


class PlaneWave(Field):
    """exp(i k d . x); solves the homogeneous Helmholtz equation, not Laplace."""

    def __init__(self, k, direction):
        self.k = float(k)
        self.direction = np.asarray(direction, dtype=float) / np.linalg.norm(direction)

    def __call__(self, x):
        return np.exp(1j * self.k * (np.atleast_2d(x) @ self.direction))

    def gradient(self, x):
        return 1j * self.k * self(x)[:, None] * self.direction[None, :]

    def laplacian(self, x):
        return -self.k ** 2 * self(x)


class BoxBump(Field):
    """prod_i ((x_i - lo_i)(hi_i - x_i))^2, vanishing to second order on every face."""

    def __init__(self, lo, hi):
        self.lo, self.hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)

    def _factors(self, x):
        x = np.atleast_2d(x)
        p = (x - self.lo) * (self.hi - x)
        dp = self.hi + self.lo - 2.0 * x
        return p * p, 2.0 * p * dp, 2.0 * dp * dp - 4.0 * p

    def __call__(self, x):
        g, _, _ = self._factors(x)
        return np.prod(g, axis=1).astype(complex)

    def _swap(self, g, replacement, i):
        others = np.prod(np.delete(g, i, axis=1), axis=1)
        return replacement[:, i] * others

    def gradient(self, x):
        g, dg, _ = self._factors(x)
        return np.column_stack([self._swap(g, dg, i) for i in range(g.shape[1])]).astype(complex)

    def laplacian(self, x):
        g, _, d2g = self._factors(x)
        return sum(self._swap(g, d2g, i) for i in range(g.shape[1])).astype(complex)


class FlatWallField(Field):
    """x_n^2 cos(x_1): vanishes with its gradient on the wall {x_n = 0}."""

    def __call__(self, x):
        x = np.atleast_2d(x)
        return (x[:, -1] ** 2 * np.cos(x[:, 0])).astype(complex)

    def gradient(self, x):
        x = np.atleast_2d(x)
        out = np.zeros(x.shape, dtype=complex)
        out[:, 0] = -x[:, -1] ** 2 * np.sin(x[:, 0])
        out[:, -1] += 2.0 * x[:, -1] * np.cos(x[:, 0])
        return out

    def laplacian(self, x):
        x = np.atleast_2d(x)
        return ((2.0 - x[:, -1] ** 2) * np.cos(x[:, 0])).astype(complex)


class CapBump(Field):
    """(x_n - omega(x'))^2 (1 + x_1): vanishes to second order on the cap graph."""

    def __init__(self, cap):
        self.cap = cap

    def _parts(self, x):
        x = np.atleast_2d(x)
        xp = x[:, :-1]
        return x, self.cap.omega(xp), self.cap.omega_gradient(xp), self.cap.omega_laplacian(xp)

    def __call__(self, x):
        x, w, _, _ = self._parts(x)
        return ((x[:, -1] - w) ** 2 * (1.0 + x[:, 0])).astype(complex)

    def gradient(self, x):
        x, w, gw, _ = self._parts(x)
        s = x[:, -1] - w
        g = 1.0 + x[:, 0]
        out = np.zeros(x.shape, dtype=complex)
        out[:, :-1] = -2.0 * (s * g)[:, None] * gw
        out[:, 0] += s * s
        out[:, -1] = 2.0 * s * g
        return out

    def laplacian(self, x):
        x, w, gw, lw = self._parts(x)
        s = x[:, -1] - w
        g = 1.0 + x[:, 0]
        return (g * (2.0 * (1.0 + np.sum(gw * gw, axis=1)) - 2.0 * s * lw) - 4.0 * s * gw[:, 0]).astype(complex)


class RadiationlessCapBump(Field):
    """(x_n - omega)^2 (h - x_n)^2 (b^2 - |x'|^2)^2, in H^2_0 of the cap box Omega_{b,h}."""

    def __init__(self, cap):
        self.cap = cap

    def _parts(self, x):
        x = np.atleast_2d(x)
        xp = x[:, :-1]
        s = x[:, -1] - self.cap.omega(xp)
        t = self.cap.h - x[:, -1]
        q = self.cap.b ** 2 - np.sum(xp * xp, axis=1)
        return x, xp, s, t, q

    def __call__(self, x):
        _, _, s, t, q = self._parts(x)
        return (s * s * t * t * q * q).astype(complex)

    def gradient(self, x):
        x, xp, s, t, q = self._parts(x)
        gw = self.cap.omega_gradient(xp)
        A, B, C = s * s, t * t, q * q
        out = np.zeros(x.shape, dtype=complex)
        out[:, :-1] = (-2.0 * s * B * C)[:, None] * gw + (A * B * (-4.0 * q))[:, None] * xp
        out[:, -1] = 2.0 * s * B * C - 2.0 * t * A * C
        return out

    def laplacian(self, x):
        x, xp, s, t, q = self._parts(x)
        n = x.shape[1]
        gw = self.cap.omega_gradient(xp)
        lw = self.cap.omega_laplacian(xp)
        r2 = np.sum(xp * xp, axis=1)
        A, B, C = s * s, t * t, q * q
        lap_A = 2.0 * (1.0 + np.sum(gw * gw, axis=1)) - 2.0 * s * lw
        lap_C = 8.0 * r2 - 4.0 * (n - 1) * q
        grad_AB = -4.0 * s * t
        grad_AC = 8.0 * s * q * np.sum(gw * xp, axis=1)
        return (lap_A * B * C + 2.0 * A * C + A * B * lap_C + 2.0 * (grad_AB * C + grad_AC * B)).astype(complex)


class TransmissionPair:
    """u = w + d with w a plane wave and d in H^2_0, so u - w and its normal derivative vanish on the boundary.

    The contrast that makes (Delta + k^2(1 + V)) u = 0 is V = -(Delta + k^2) d / (k^2 u).
    """

    def __init__(self, k, direction, difference, scale=1.0):
        self.k = float(k)
        self.w = PlaneWave(k, direction)
        self.difference = difference
        self.scale = float(scale)

    def u(self, x):
        return self.w(x) + self.scale * self.difference(x)

    def contrast(self, x):
        phi = self.difference.source(self.k)(x)
        return -self.scale * phi / (self.k ** 2 * self.u(x))
