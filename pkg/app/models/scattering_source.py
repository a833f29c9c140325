# app/models/scattering_source.py
"""Source scattering: u = (Delta + k^2)^{-1} f with the outgoing kernel, and its far-field pattern."""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from app.config import Config
from app.models.grid import GridField, cell_grid, sample, volume_fractions
from app.models.holder_calculus import boundary_sup, holder_norm
from app.models.kernels import VolumePotential, far_field_constant, green_kernel
from app.models.specfun import bessel_zero
from app.utils.errors import ConfigError, DomainError, QuadratureFailure
from app.utils.export import write_csv, write_json
from app.utils.logger import logger

NODE_CHUNK = 4096
TARGET_CHUNK = 128


def sphere_directions(n, n_dirs):
    """Directions, quadrature weights and angle columns covering the unit sphere.

    n=2: n_dirs equispaced angles. n=3: n_dirs Gauss-Legendre polar nodes times
    2*n_dirs equispaced azimuths.
    """
    if n_dirs < 8:
        raise ConfigError("far fields need at least 8 directions")
    if n == 2:
        theta = 2.0 * np.pi * np.arange(n_dirs) / n_dirs
        dirs = np.column_stack([np.cos(theta), np.sin(theta)])
        return dirs, np.full(n_dirs, 2.0 * np.pi / n_dirs), theta[:, None]
    if n == 3:
        z, wz = np.polynomial.legendre.leggauss(n_dirs)
        phi = np.pi * np.arange(2 * n_dirs) / n_dirs
        zz, pp = np.meshgrid(z, phi, indexing="ij")
        s = np.sqrt(1.0 - zz * zz)
        dirs = np.column_stack([(s * np.cos(pp)).ravel(), (s * np.sin(pp)).ravel(), zz.ravel()])
        weights = (wz[:, None] * np.full(2 * n_dirs, np.pi / n_dirs)[None, :]).ravel()
        angles = np.column_stack([np.arccos(zz).ravel(), pp.ravel()])
        return dirs, weights, angles
    raise ConfigError("far fields are implemented for n in {2, 3}")


@dataclass(eq=False)
class FarField:
    directions: np.ndarray
    values: np.ndarray
    k: float
    weights: np.ndarray
    angles: np.ndarray

    @property
    def n(self):
        return self.directions.shape[1]

    def sup(self):
        return float(np.max(np.abs(self.values)))

    def l2_norm(self):
        return math.sqrt(float(np.sum(np.abs(self.values) ** 2 * self.weights)))

    def __add__(self, other):
        return FarField(self.directions, self.values + other.values, self.k, self.weights, self.angles)

    def scaled(self, factor):
        return FarField(self.directions, factor * self.values, self.k, self.weights, self.angles)

    def rows(self):
        for angle, value in zip(self.angles, self.values):
            yield [*angle.tolist(), float(value.real), float(value.imag)]

    def to_csv(self, path):
        header = ["angle", "re", "im"] if self.n == 2 else ["polar", "azimuth", "re", "im"]
        return write_csv(path, header, self.rows())

    def to_json(self, path):
        return write_json(path, {
            "k": self.k,
            "n": self.n,
            "directions": self.directions,
            "values": self.values,
            "weights": self.weights,
        })


class SourceScene:
    def __init__(self, domain, phi, k, spacing=None, near_radius=None):
        if k <= 0:
            raise ConfigError("wavenumber must be positive")
        self.domain = domain
        self.phi = phi
        self.k = float(k)
        self.n = domain.n
        wavelength = 2.0 * np.pi / self.k
        self.spacing = float(spacing) if spacing else min(domain.diameter / 48.0, wavelength / 10.0)
        self.near_radius = float(near_radius) if near_radius else 2.0 * self.spacing

    @cached_property
    def quadrature(self):
        nodes, weights = self.domain.quadrature(self.spacing)
        density = np.asarray(self.phi(nodes), dtype=complex)
        if not np.all(np.isfinite(density)):
            raise QuadratureFailure("source density is not finite at the quadrature nodes")
        return nodes, weights * density

    def source(self, x):
        x = np.atleast_2d(x)
        return np.where(self.domain.contains(x), np.asarray(self.phi(x), dtype=complex), 0.0)

    def mass(self):
        return complex(np.sum(self.quadrature[1]))

    def translated(self, shift):
        from app.models.geometry import Domain
        shift = np.asarray(shift, dtype=float)
        return SourceScene(Domain([_Shifted(c, shift) for c in self.domain.components]),
                           lambda x: self.phi(np.atleast_2d(x) - shift), self.k, self.spacing, self.near_radius)


class _Shifted:
    """A shape moved rigidly by a vector."""

    def __init__(self, shape, shift):
        self.shape, self.shift, self.n = shape, shift, shape.n

    def contains(self, points):
        return self.shape.contains(np.atleast_2d(points) - self.shift)

    def boundary(self, count):
        p, nrm, w = self.shape.boundary(count)
        return p + self.shift, nrm, w

    def bounding_box(self):
        lo, hi = self.shape.bounding_box()
        return lo + self.shift, hi + self.shift

    def quadrature(self, spacing):
        x, w = self.shape.quadrature(spacing)
        return x + self.shift, w


def _polar_ball(n, radius):
    if n == 2:
        r, wr = np.polynomial.legendre.leggauss(16)
        r, wr = 0.5 * radius * (r + 1.0), 0.5 * radius * wr
        theta = 2.0 * np.pi * (np.arange(32) + 0.5) / 32
        rr, tt = np.meshgrid(r, theta, indexing="ij")
        pts = np.column_stack([(rr * np.cos(tt)).ravel(), (rr * np.sin(tt)).ravel()])
        w = ((wr * r)[:, None] * np.full(32, 2.0 * np.pi / 32)).ravel()
        return pts, w
    r, wr = np.polynomial.legendre.leggauss(12)
    r, wr = 0.5 * radius * (r + 1.0), 0.5 * radius * wr
    z, wz = np.polynomial.legendre.leggauss(12)
    phi = 2.0 * np.pi * (np.arange(24) + 0.5) / 24
    rr, zz, pp = np.meshgrid(r, z, phi, indexing="ij")
    s = np.sqrt(1.0 - zz * zz)
    pts = np.column_stack([(rr * s * np.cos(pp)).ravel(), (rr * s * np.sin(pp)).ravel(), (rr * zz).ravel()])
    w = ((wr * r * r)[:, None, None] * wz[None, :, None] * np.full(24, 2.0 * np.pi / 24)[None, None, :]).ravel()
    return pts, w


def solve_field(scene, eval_points):
    """u at arbitrary points by direct summation over the source quadrature.

    Nodes closer than the near radius are replaced by a polar Gauss rule
    centred at the target, which absorbs the kernel singularity.
    """
    targets = np.atleast_2d(np.asarray(eval_points, dtype=float))
    nodes, masses = scene.quadrature
    if not np.any(masses):
        return np.zeros(targets.shape[0], dtype=complex)
    rho = scene.near_radius
    polar_pts, polar_w = _polar_ball(scene.n, rho)

    def chunk(start):
        x = targets[start:start + TARGET_CHUNK]
        out = np.zeros(x.shape[0], dtype=complex)
        for i, xi in enumerate(x):
            r = np.linalg.norm(nodes - xi, axis=1)
            far = r >= rho
            out[i] = np.sum(green_kernel(r[far], scene.k, scene.n) * masses[far])
            if not far.all():
                local = xi + polar_pts
                g = green_kernel(np.linalg.norm(polar_pts, axis=1), scene.k, scene.n)
                out[i] += np.sum(g * scene.source(local) * polar_w)
        return out

    with ThreadPoolExecutor(max_workers=Config.THREADS) as pool:
        parts = list(pool.map(chunk, range(0, targets.shape[0], TARGET_CHUNK)))
    return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)


def solve_field_grid(scene, spacing, padding=0.0):
    """u on a cell-centred grid via the FFT Nystrom volume potential."""
    if scene.n not in (2, 3):
        raise ConfigError("grid potentials are implemented for n in {2, 3}")
    first, shape = cell_grid(scene.domain, spacing, padding)
    fractions = volume_fractions(scene.domain, first, shape, spacing)
    centres = np.stack(np.meshgrid(*[c + spacing * np.arange(m) for c, m in zip(first, shape)], indexing="ij"),
                       axis=-1).reshape(-1, scene.n)
    density = np.zeros(centres.shape[0], dtype=complex)
    inside = fractions.ravel() > 0
    density[inside] = np.asarray(scene.phi(centres[inside]), dtype=complex) * fractions.ravel()[inside]
    potential = VolumePotential(shape, spacing, scene.k)
    values = potential(density.reshape(shape))
    logger.info(f"Grid source solve on {shape} cells at spacing {spacing:g}")
    return GridField(first, spacing, values), GridField(first, spacing, density.reshape(shape))


def fourier_on_sphere(scene, n_dirs):
    """F f(k xhat) = (2 pi)^{-n} int e^{-i k xhat . y} f(y) dy on the sphere of radius k."""
    directions, weights, angles = sphere_directions(scene.n, n_dirs)
    nodes, masses = scene.quadrature

    def chunk(start):
        y = nodes[start:start + NODE_CHUNK]
        return np.exp(-1j * scene.k * (directions @ y.T)) @ masses[start:start + NODE_CHUNK]

    with ThreadPoolExecutor(max_workers=Config.THREADS) as pool:
        parts = list(pool.map(chunk, range(0, nodes.shape[0], NODE_CHUNK)))
    total = np.zeros(directions.shape[0], dtype=complex)
    for part in parts:
        total += part
    return directions, weights, angles, total / (2.0 * np.pi) ** scene.n


def far_field(scene, n_dirs=64):
    directions, weights, angles, transform = fourier_on_sphere(scene, n_dirs)
    values = (2.0 * np.pi) ** scene.n * far_field_constant(scene.k, scene.n) * transform
    return FarField(directions, values, scene.k, weights, angles)


def radiationless_radius(k, n, branch_index):
    """r0 with J_{n/2}(k r0) = 0: the ball indicator of this radius has no far field."""
    if k <= 0:
        raise DomainError("wavenumber must be positive")
    return bessel_zero(n / 2.0, branch_index) / k


def visibility_ratio(scene, alpha, spacing=None):
    f = sample(scene.phi, scene.domain, spacing or scene.spacing, alpha=alpha)
    norm = holder_norm(f, alpha)
    if norm == 0:
        return 0.0
    return boundary_sup(f, scene.domain) / norm / scene.domain.diameter ** alpha
