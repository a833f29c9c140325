# app/models/kernels.py
"""Outgoing fundamental solution of the Helmholtz operator and its grid convolution."""
import cmath
import math

import numpy as np
import scipy.fft

from app.config import Config
from app.models.specfun import hankel1
from app.utils.errors import ConfigError, DomainError


def green_kernel(r, k, n):
    """G(r) = -(i/4) (k / 2 pi r)^{(n-2)/2} H^(1)_{(n-2)/2}(k r), so that (Delta + k^2) G = delta."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("the Green kernel is singular at r = 0")
    if n == 3:
        return -np.exp(1j * k * r) / (4.0 * np.pi * r)
    order = (n - 2) / 2.0
    return -0.25j * (k / (2.0 * np.pi * r)) ** order * hankel1(order, k * r)


def far_field_constant(k, n):
    """C_{n,k} with G(x - y) ~ C_{n,k} e^{ik|x|} |x|^{-(n-1)/2} e^{-ik xhat.y} as |x| grows."""
    if k <= 0:
        raise DomainError("wavenumber must be positive")
    return (-1j / math.sqrt(8.0 * math.pi * k)) * (k / (2.0 * math.pi)) ** ((n - 2) / 2.0) \
        * cmath.exp(-1j * (n - 1) * math.pi / 4.0)


def equivalent_radius(volume, n):
    if n == 2:
        return math.sqrt(volume / math.pi)
    if n == 3:
        return (3.0 * volume / (4.0 * math.pi)) ** (1.0 / 3.0)
    raise ConfigError("grid potentials are implemented for n in {2, 3}")


def ball_green_integral(a, k, n):
    """int over |y| < a of G(|y|) dy, in closed form."""
    if n == 2:
        return -0.25j * 2.0 * math.pi * (a * complex(hankel1(1, k * a)) / k + 2j / (math.pi * k * k))
    if n == 3:
        return -(cmath.exp(1j * k * a) * (a / (1j * k) + 1.0 / (k * k)) - 1.0 / (k * k))
    raise ConfigError("grid potentials are implemented for n in {2, 3}")


class VolumePotential:
    """Nystrom discretisation of (G * f)(x_i) = sum_j W(x_i - x_j) f_j on a cell-centred grid.

    Off-diagonal weights are G at the cell offset times the cell volume; the
    diagonal weight integrates G over the ball of equal volume. The kernel is
    laid out on the doubled grid and applied by FFT.
    """

    def __init__(self, shape, spacing, k, workers=None):
        self.shape = tuple(int(m) for m in shape)
        self.n = len(self.shape)
        self.spacing = float(spacing)
        self.k = float(k)
        self.workers = workers or Config.THREADS
        if self.k <= 0:
            raise DomainError("wavenumber must be positive")
        padded = tuple(2 * m for m in self.shape)
        offsets = np.meshgrid(*[scipy.fft.fftfreq(p, 1.0 / p) for p in padded], indexing="ij")
        r = self.spacing * np.sqrt(sum(o * o for o in offsets))
        volume = self.spacing ** self.n
        kernel = np.empty(padded, dtype=complex)
        nonzero = r > 0
        kernel[nonzero] = green_kernel(r[nonzero], self.k, self.n) * volume
        kernel[(0,) * self.n] = ball_green_integral(equivalent_radius(volume, self.n), self.k, self.n)
        self._kernel_hat = scipy.fft.fftn(kernel, workers=self.workers)

    def __call__(self, values):
        values = np.asarray(values, dtype=complex)
        if values.shape != self.shape:
            raise ConfigError(f"expected grid values of shape {self.shape}, got {values.shape}")
        out = scipy.fft.ifftn(self._kernel_hat * scipy.fft.fftn(values, s=self._kernel_hat.shape, workers=self.workers),
                              workers=self.workers)
        return out[tuple(slice(0, m) for m in self.shape)]

    def adjoint(self, values):
        # the kernel is symmetric, so G^H v = conj(G conj v)
        return np.conj(self(np.conj(values)))

    def kernel_l1(self, radius):
        """Young bound int_{|z| < radius} |G(z)| dz, summed on the same grid."""
        padded = self._kernel_hat.shape
        offsets = np.meshgrid(*[scipy.fft.fftfreq(p, 1.0 / p) for p in padded], indexing="ij")
        r = self.spacing * np.sqrt(sum(o * o for o in offsets))
        inside = (r > 0) & (r < radius)
        volume = self.spacing ** self.n
        a = equivalent_radius(volume, self.n)
        self_mass = _ball_abs_green(a, self.k, self.n)
        return float(np.sum(np.abs(green_kernel(r[inside], self.k, self.n))) * volume + self_mass)


def _ball_abs_green(a, k, n, nodes=64):
    r, w = np.polynomial.legendre.leggauss(nodes)
    r = 0.5 * a * (r + 1.0)
    w = 0.5 * a * w
    shell = 2.0 * math.pi * r if n == 2 else 4.0 * math.pi * r * r
    return float(np.sum(np.abs(green_kernel(r, k, n)) * shell * w))
