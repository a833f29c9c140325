# app/models/grid.py
import math

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from app.utils.errors import ConfigError

QUADRATURES = ("masked", "simpson")


def simpson_weights(count, step):
    if count < 3 or count % 2 == 0:
        raise ConfigError("Simpson weights need an odd node count of at least 3")
    w = np.full(count, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * step / 3.0


class GridField:
    """Complex values on a uniform tensor grid, optionally masked to a domain."""

    def __init__(self, lo, steps, values, mask=None, quadrature="masked", method="cubic"):
        self.values = np.asarray(values, dtype=complex)
        self.n = self.values.ndim
        self.lo = np.broadcast_to(np.asarray(lo, dtype=float), (self.n,)).copy()
        self.steps = np.broadcast_to(np.asarray(steps, dtype=float), (self.n,)).copy()
        if np.any(self.steps <= 0):
            raise ConfigError("grid spacing must be positive")
        if not np.all(np.isfinite(self.values)):
            raise ConfigError("sampled values must be finite")
        self.mask = np.ones(self.values.shape, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
        if quadrature not in QUADRATURES:
            raise ConfigError(f"unknown grid quadrature '{quadrature}'")
        self.quadrature = quadrature
        self.method = method if min(self.values.shape) >= 4 else "linear"
        self._interpolators = None

    @classmethod
    def from_function(cls, f, lo, hi, spacing, domain=None, **kwargs):
        lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
        counts = np.maximum(2, np.round((hi - lo) / spacing).astype(int)) + 1
        steps = (hi - lo) / (counts - 1)
        axes = [a + s * np.arange(m) for a, s, m in zip(lo, steps, counts)]
        points = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, lo.size)
        values = np.asarray(f(points), dtype=complex).reshape(tuple(counts))
        mask = None if domain is None else domain.contains(points).reshape(tuple(counts))
        return cls(lo, steps, values, mask=mask, **kwargs)

    @property
    def spacing(self):
        return float(self.steps.max())

    @property
    def axes(self):
        return [a + s * np.arange(m) for a, s, m in zip(self.lo, self.steps, self.values.shape)]

    @property
    def points(self):
        return np.stack(np.meshgrid(*self.axes, indexing="ij"), axis=-1).reshape(-1, self.n)

    @property
    def masked_points(self):
        return self.points[self.mask.ravel()]

    @property
    def masked_values(self):
        return self.values[self.mask]

    def __call__(self, x):
        if self._interpolators is None:
            self._interpolators = tuple(
                RegularGridInterpolator(self.axes, part, method=self.method, bounds_error=False, fill_value=None)
                for part in (self.values.real, self.values.imag))
        x = np.atleast_2d(x)
        real, imag = (interp(x) for interp in self._interpolators)
        return real + 1j * imag

    def gradient(self):
        return [np.gradient(self.values, self.steps[i], axis=i, edge_order=2) for i in range(self.n)]

    def laplacian(self):
        """Three-point Laplacian inside, twice-differentiated np.gradient on the outer layer."""
        lap = np.zeros_like(self.values)
        for i in range(self.n):
            h = self.steps[i]
            d2 = np.gradient(np.gradient(self.values, h, axis=i, edge_order=2), h, axis=i, edge_order=2)
            centre = [slice(None)] * self.n
            centre[i] = slice(1, -1)
            ahead, behind = list(centre), list(centre)
            ahead[i], behind[i] = slice(2, None), slice(None, -2)
            d2[tuple(centre)] = (self.values[tuple(ahead)] - 2.0 * self.values[tuple(centre)]
                                 + self.values[tuple(behind)]) / (h * h)
            lap += d2
        return lap

    def weights(self):
        if self.quadrature == "simpson":
            w = np.ones(())
            for count, step in zip(self.values.shape, self.steps):
                w = np.multiply.outer(w, simpson_weights(count, step))
            return w * self.mask
        return math.prod(self.steps) * self.mask

    def integrate(self, values=None):
        values = self.values if values is None else values
        return complex(np.sum(values * self.weights()))

    def with_values(self, values):
        return type(self)(self.lo, self.steps, values, mask=self.mask, quadrature=self.quadrature, method=self.method)


class SampledFunction(GridField):
    def __init__(self, lo, steps, values, mask=None, quadrature="masked", method="cubic", alpha=1.0):
        super().__init__(lo, steps, values, mask=mask, quadrature=quadrature, method=method)
        if not 0 < alpha <= 1:
            raise ConfigError("Holder exponent must lie in (0, 1]")
        self.alpha = float(alpha)

    def with_values(self, values):
        return type(self)(self.lo, self.steps, values, mask=self.mask, quadrature=self.quadrature,
                          method=self.method, alpha=self.alpha)


def sample(f, domain, spacing, alpha=1.0, method="cubic"):
    """Sample f on a grid adapted to domain.

    A single box is sampled node-aligned with an even number of intervals per
    axis and integrated with Simpson weights; anything else is sampled on its
    padded bounding box and integrated with masked cell volumes.
    """
    from app.models.geometry import Box

    if len(domain.components) == 1 and isinstance(domain.components[0], Box):
        box = domain.components[0]
        length = box.hi - box.lo
        counts = 2 * np.ceil(length / (2.0 * spacing)).astype(int) + 1
        steps = length / (counts - 1)
        grid = SampledFunction(box.lo, steps, np.zeros(tuple(counts)), quadrature="simpson", method=method,
                               alpha=alpha)
        values = np.asarray(f(grid.points), dtype=complex).reshape(tuple(counts))
        return grid.with_values(values)
    lo, hi = domain.bounding_box
    lo, hi = lo - 2.0 * spacing, hi + 2.0 * spacing
    counts = np.ceil((hi - lo) / spacing).astype(int) + 1
    grid = SampledFunction(lo, spacing, np.zeros(tuple(counts)), method=method, alpha=alpha)
    points = grid.points
    values = np.asarray(f(points), dtype=complex).reshape(tuple(counts))
    mask = domain.contains(points).reshape(tuple(counts))
    return SampledFunction(lo, spacing, values, mask=mask, method=method, alpha=alpha)


def cell_grid(domain, spacing, padding=0.0):
    """First cell centre and shape of a cell-centred grid covering the padded bounding box."""
    lo, hi = domain.bounding_box
    lo, hi = lo - padding, hi + padding
    shape = tuple(int(m) for m in np.ceil((hi - lo) / spacing))
    return lo + 0.5 * spacing, shape


def volume_fractions(domain, first_centre, shape, spacing, supersample=8):
    """Fraction of each cell inside domain; cells whose corners disagree are supersampled."""
    n = len(shape)
    corner_axes = [c - 0.5 * spacing + spacing * np.arange(m + 1) for c, m in zip(first_centre, shape)]
    corners = np.stack(np.meshgrid(*corner_axes, indexing="ij"), axis=-1).reshape(-1, n)
    inside = domain.contains(corners).reshape(tuple(m + 1 for m in shape))
    centre_axes = [c + spacing * np.arange(m) for c, m in zip(first_centre, shape)]
    centres = np.stack(np.meshgrid(*centre_axes, indexing="ij"), axis=-1).reshape(-1, n)
    fractions = domain.contains(centres).reshape(shape).astype(float)

    votes = np.zeros(shape, dtype=int)
    for offset in np.ndindex(*(2,) * n):
        votes += inside[tuple(slice(o, o + m) for o, m in zip(offset, shape))]
    mixed = (votes > 0) & (votes < 2 ** n)
    if mixed.any():
        sub = (np.arange(supersample) + 0.5) / supersample - 0.5
        local = np.stack(np.meshgrid(*(sub,) * n, indexing="ij"), axis=-1).reshape(-1, n) * spacing
        mixed_centres = centres[mixed.ravel()]
        hits = domain.contains((mixed_centres[:, None, :] + local[None, :, :]).reshape(-1, n))
        fractions[mixed] = hits.reshape(mixed_centres.shape[0], -1).mean(axis=1)
    return fractions
