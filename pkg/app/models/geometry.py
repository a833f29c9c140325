# app/models/geometry.py
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import ndimage
from scipy.optimize import brentq, minimize_scalar
from scipy.spatial import ConvexHull, cKDTree
from scipy.spatial.distance import pdist

from app.utils.errors import ConfigError, InadmissiblePerturbation, ResolutionTooCoarse

BOUNDARY_SAMPLES = {1: 2, 2: 2 ** 10, 3: 2 ** 14}


def fibonacci_sphere(count):
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    theta = np.pi * (1.0 + 5 ** 0.5) * i
    s = np.sqrt(1.0 - z * z)
    return np.column_stack([s * np.cos(theta), s * np.sin(theta), z])


def _gauss(count, a, b):
    x, w = np.polynomial.legendre.leggauss(int(count))
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def _count(length, spacing, minimum=8):
    return max(minimum, int(math.ceil(length / spacing)))


# --- cubic perturbations and curvature caps ---

@dataclass(frozen=True)
class CubicPerturbation:
    """c|x'|^3 + sum of coeff * x'^beta over |beta| = 3."""
    radial: float = 0.0
    monomials: tuple = ()

    @classmethod
    def from_spec(cls, spec, n):
        spec = spec or {}
        monomials = []
        for key, coeff in sorted((spec.get("monomials") or {}).items()):
            beta = tuple(int(ch) for ch in key)
            if len(beta) != n - 1 or sum(beta) != 3:
                raise ConfigError(f"monomial '{key}' is not a degree-3 exponent in {n - 1} variables")
            monomials.append((beta, float(coeff)))
        return cls(float(spec.get("radial", 0.0)), tuple(monomials))

    def value(self, xp):
        r = np.linalg.norm(xp, axis=1)
        out = self.radial * r ** 3
        for beta, c in self.monomials:
            out = out + c * np.prod(xp ** np.array(beta), axis=1)
        return out

    def gradient(self, xp):
        r = np.linalg.norm(xp, axis=1)
        out = 3.0 * self.radial * r[:, None] * xp
        for beta, c in self.monomials:
            for i, b_i in enumerate(beta):
                if b_i == 0:
                    continue
                lowered = np.array(beta)
                lowered[i] -= 1
                out[:, i] += c * b_i * np.prod(xp ** lowered, axis=1)
        return out

    def laplacian(self, xp):
        d = xp.shape[1]
        r = np.linalg.norm(xp, axis=1)
        out = 3.0 * (d + 1) * self.radial * r
        for beta, c in self.monomials:
            for i, b_i in enumerate(beta):
                if b_i < 2:
                    continue
                lowered = np.array(beta)
                lowered[i] -= 2
                out = out + c * b_i * (b_i - 1) * np.prod(xp ** lowered, axis=1)
        return out

    def third_derivative_bound(self):
        bound = 6.0 * abs(self.radial)
        if self.monomials:
            bound += max(math.prod(math.factorial(b) for b in beta) * abs(c) for beta, c in self.monomials)
        return bound


@dataclass(frozen=True)
class CurvatureCap:
    K: float
    L: float
    M: float
    delta: float
    K_minus: float
    K_plus: float
    n: int = 2
    perturbation: CubicPerturbation = field(default_factory=CubicPerturbation)

    @property
    def b(self):
        return math.sqrt(self.M) / self.K

    @property
    def h(self):
        return 1.0 / self.K

    def omega(self, xp):
        xp = np.atleast_2d(np.asarray(xp, dtype=float))
        return self.K * np.sum(xp * xp, axis=1) + self.perturbation.value(xp)

    def omega_gradient(self, xp):
        xp = np.atleast_2d(np.asarray(xp, dtype=float))
        return 2.0 * self.K * xp + self.perturbation.gradient(xp)

    def omega_laplacian(self, xp):
        xp = np.atleast_2d(np.asarray(xp, dtype=float))
        return 2.0 * self.K * xp.shape[1] + self.perturbation.laplacian(xp)

    def sample_slice(self, count=2000):
        """Points x' with |x'| < b, radially graded towards the rim."""
        if self.n == 2:
            return np.linspace(-self.b, self.b, count + 2)[1:-1, None]
        side = int(math.ceil(math.sqrt(count)))
        r = self.b * (np.arange(1, side + 1) / (side + 1))
        theta = 2.0 * np.pi * np.arange(side) / side
        rr, tt = np.meshgrid(r, theta, indexing="ij")
        return np.column_stack([(rr * np.cos(tt)).ravel(), (rr * np.sin(tt)).ravel()])

    def violations(self):
        problems = []
        xp = self.sample_slice()
        r2 = np.sum(xp * xp, axis=1)
        w = self.omega(xp)
        slack = 1e-12 * self.K * r2
        if np.any(w < self.K_minus * r2 - slack):
            problems.append("omega dips below K_minus|x'|^2")
        if np.any(w > self.K_plus * r2 + slack):
            problems.append("omega exceeds K_plus|x'|^2")
        for name, value in (("K_minus", self.K_minus), ("K_plus", self.K_plus)):
            ratio = value / self.K
            if ratio < 1.0 / self.M * (1 - 1e-12) or ratio > self.M * (1 + 1e-12):
                problems.append(f"{name}/K = {ratio:.6g} outside [1/M, M]")
        if self.K_plus - self.K_minus > self.L * self.K ** (1.0 - self.delta) * (1 + 1e-12):
            problems.append("spread K_plus - K_minus exceeds L K^(1-delta)")
        if self.h > self.K_minus * self.b ** 2 * (1 + 1e-12):
            problems.append("h exceeds K_minus b^2")
        return problems

    def validate(self):
        problems = self.violations()
        if problems:
            raise InadmissiblePerturbation("; ".join(problems))
        return self


def _monomial_weight_sum(xp):
    d = xp.shape[1]
    total = np.zeros(xp.shape[0])
    for beta in itertools.product(range(4), repeat=d):
        if sum(beta) != 3:
            continue
        weight = 1.0 / math.prod(math.factorial(b) for b in beta)
        total += weight * np.prod(xp ** np.array(beta), axis=1)
    return total


def compute_cn(n):
    """sup over the unit sphere of R^{n-1} of sum_{|beta|=3} x'^beta / beta!."""
    if n not in (2, 3):
        raise ConfigError("c_n is tabulated for n in {2, 3}")
    if n == 2:
        return float(np.max(_monomial_weight_sum(np.array([[-1.0], [1.0]]))))

    def value(theta):
        return float(_monomial_weight_sum(np.array([[math.cos(theta), math.sin(theta)]]))[0])

    grid = 2.0 * np.pi * np.arange(4096) / 4096
    values = _monomial_weight_sum(np.column_stack([np.cos(grid), np.sin(grid)]))
    best = grid[int(np.argmax(values))]
    step = 2.0 * np.pi / 4096
    refined = minimize_scalar(lambda t: -value(t), bounds=(best - step, best + step), method="bounded",
                              options={"xatol": 1e-12})
    return max(float(values.max()), -float(refined.fun))


def make_curvature_cap(K, cubic=None, L=1.0, M=2.0, delta=0.5, n=2):
    if K < math.e:
        raise InadmissiblePerturbation(f"curvature caps need K >= e, got {K}")
    if M < 1 or L <= 0 or delta <= 0:
        raise ConfigError("cap parameters need M >= 1, L > 0, delta > 0")
    perturbation = cubic if isinstance(cubic, CubicPerturbation) else CubicPerturbation.from_spec(cubic, n)
    f_K = perturbation.third_derivative_bound()
    c_n = compute_cn(n)
    bound = min((M - 1.0) * K ** 2 / (c_n * M ** 1.5), L * K ** (2.0 - delta) / (2.0 * c_n * math.sqrt(M)))
    if f_K > bound:
        raise InadmissiblePerturbation(f"third-derivative size {f_K:.6g} exceeds admissible {bound:.6g}")
    spread = c_n * f_K * math.sqrt(M) / K
    cap = CurvatureCap(K=float(K), L=float(L), M=float(M), delta=float(delta),
                       K_minus=K - spread, K_plus=K + spread, n=n, perturbation=perturbation)
    return cap.validate()


@dataclass(frozen=True)
class NestingReport:
    samples: int
    violations: int
    plus_count: int
    omega_count: int
    minus_count: int
    slice_nonempty: bool
    slice_star_shaped: bool

    def to_dict(self):
        return dict(self.__dict__)


def nesting_check(cap, samples=10_000):
    """Counts grid points breaking {K+|x'|^2<x_n<h} <= Omega_bh <= {K-|x'|^2<x_n<h}."""
    n, b, h = cap.n, cap.b, cap.h
    m = int(math.ceil(samples ** (1.0 / n)))
    centres = lambda lo, hi: lo + (hi - lo) * (np.arange(m) + 0.5) / m
    axes = [centres(-b, b)] * (n - 1) + [centres(-h, h)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    xp, xn = pts[:, :-1], pts[:, -1]
    r2 = np.sum(xp * xp, axis=1)
    in_box = r2 < b * b
    below_top = xn < h
    in_plus = in_box & below_top & (cap.K_plus * r2 < xn)
    in_omega = in_box & below_top & (cap.omega(xp) < xn)
    in_minus = in_box & below_top & (cap.K_minus * r2 < xn)
    violations = int(np.count_nonzero(in_plus & ~in_omega) + np.count_nonzero(in_omega & ~in_minus))

    if n == 2:
        directions = np.array([[-1.0], [1.0]])
    else:
        theta = 2.0 * np.pi * np.arange(64) / 64
        directions = np.column_stack([np.cos(theta), np.sin(theta)])
    radii = b * np.arange(1, 201) / 201
    star = True
    for direction in directions:
        below = cap.omega(radii[:, None] * direction[None, :]) < h
        first_out = np.argmin(below) if not below.all() else below.size
        star &= not below[first_out:].any()
    return NestingReport(samples=int(pts.shape[0]), violations=violations,
                         plus_count=int(in_plus.sum()), omega_count=int(in_omega.sum()),
                         minus_count=int(in_minus.sum()),
                         slice_nonempty=bool(cap.omega(np.zeros((1, n - 1)))[0] < h),
                         slice_star_shaped=bool(star))


# --- shapes ---

class Shape:
    n = 2

    def contains(self, points):
        raise NotImplementedError

    def boundary(self, count):
        raise NotImplementedError

    def bounding_box(self):
        raise NotImplementedError

    def quadrature(self, spacing):
        raise NotImplementedError


class Ball(Shape):
    def __init__(self, center, radius):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.n = self.center.size
        if self.radius <= 0:
            raise ConfigError("ball radius must be positive")

    def contains(self, points):
        return np.linalg.norm(np.atleast_2d(points) - self.center, axis=1) < self.radius

    def boundary(self, count):
        if self.n == 2:
            theta = 2.0 * np.pi * np.arange(count) / count
            normals = np.column_stack([np.cos(theta), np.sin(theta)])
            weights = np.full(count, 2.0 * np.pi * self.radius / count)
        else:
            normals = fibonacci_sphere(count)
            weights = np.full(count, 4.0 * np.pi * self.radius ** 2 / count)
        return self.center + self.radius * normals, normals, weights

    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    def quadrature(self, spacing):
        return _shell_quadrature(self.center, 0.0, self.radius, spacing)


class Annulus(Shape):
    def __init__(self, center, inner_radius, outer_radius):
        self.center = np.asarray(center, dtype=float)
        self.inner_radius, self.outer_radius = float(inner_radius), float(outer_radius)
        self.n = self.center.size
        if not 0 < self.inner_radius < self.outer_radius:
            raise ConfigError("annulus needs 0 < inner radius < outer radius")

    def contains(self, points):
        r = np.linalg.norm(np.atleast_2d(points) - self.center, axis=1)
        return (r > self.inner_radius) & (r < self.outer_radius)

    def boundary(self, count):
        outer = Ball(self.center, self.outer_radius).boundary(count)
        p, nrm, w = Ball(self.center, self.inner_radius).boundary(count)
        return (np.vstack([outer[0], p]), np.vstack([outer[1], -nrm]), np.concatenate([outer[2], w]))

    def bounding_box(self):
        return self.center - self.outer_radius, self.center + self.outer_radius

    def quadrature(self, spacing):
        return _shell_quadrature(self.center, self.inner_radius, self.outer_radius, spacing)


def _shell_quadrature(center, r_in, r_out, spacing):
    n = center.size
    r, wr = _gauss(_count(r_out - r_in, spacing), r_in, r_out)
    n_theta = _count(2.0 * np.pi * r_out, spacing, 16)
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    if n == 2:
        rr, tt = np.meshgrid(r, theta, indexing="ij")
        w = (wr * r)[:, None] * np.full(n_theta, 2.0 * np.pi / n_theta)[None, :]
        nodes = np.column_stack([(rr * np.cos(tt)).ravel(), (rr * np.sin(tt)).ravel()])
        return center + nodes, w.ravel()
    z, wz = _gauss(_count(np.pi * r_out, spacing), -1.0, 1.0)
    rr, zz, tt = np.meshgrid(r, z, theta, indexing="ij")
    s = np.sqrt(1.0 - zz * zz)
    nodes = np.column_stack([(rr * s * np.cos(tt)).ravel(), (rr * s * np.sin(tt)).ravel(), (rr * zz).ravel()])
    w = (wr * r * r)[:, None, None] * wz[None, :, None] * np.full(n_theta, 2.0 * np.pi / n_theta)[None, None, :]
    return center + nodes, w.ravel()


class Box(Shape):
    def __init__(self, lo, hi):
        self.lo, self.hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
        self.n = self.lo.size
        if np.any(self.hi <= self.lo):
            raise ConfigError("box needs lo < hi")

    def contains(self, points):
        points = np.atleast_2d(points)
        return np.all((points > self.lo) & (points < self.hi), axis=1)

    def boundary(self, count):
        if self.n == 1:
            return np.array([self.lo, self.hi]), np.array([[-1.0], [1.0]]), np.ones(2)
        per_face = max(4, int(round((count / (2 * self.n)) ** (1.0 / (self.n - 1)))))
        pts, nrm, wts = [], [], []
        for axis in range(self.n):
            others = [i for i in range(self.n) if i != axis]
            grids = [self.lo[i] + (self.hi[i] - self.lo[i]) * (np.arange(per_face) + 0.5) / per_face for i in others]
            cell = math.prod((self.hi[i] - self.lo[i]) / per_face for i in others)
            mesh = np.stack(np.meshgrid(*grids, indexing="ij"), axis=-1).reshape(-1, self.n - 1)
            for side, value in ((-1.0, self.lo[axis]), (1.0, self.hi[axis])):
                p = np.empty((mesh.shape[0], self.n))
                p[:, others] = mesh
                p[:, axis] = value
                normal = np.zeros((mesh.shape[0], self.n))
                normal[:, axis] = side
                pts.append(p)
                nrm.append(normal)
                wts.append(np.full(mesh.shape[0], cell))
        return np.vstack(pts), np.vstack(nrm), np.concatenate(wts)

    def bounding_box(self):
        return self.lo.copy(), self.hi.copy()

    def quadrature(self, spacing):
        rules = [_gauss(_count(self.hi[i] - self.lo[i], spacing), self.lo[i], self.hi[i]) for i in range(self.n)]
        nodes = np.stack(np.meshgrid(*[r[0] for r in rules], indexing="ij"), axis=-1).reshape(-1, self.n)
        weights = np.ones(1)
        for _, w in rules:
            weights = np.outer(weights, w).ravel()
        return nodes, weights


class StarShape(Shape):
    """Planar region {c + r(cos t, sin t) : r < R(t)} for a smooth positive R."""

    def __init__(self, center, radius_fn):
        self.center = np.asarray(center, dtype=float)
        self.radius_fn = radius_fn
        self.n = 2
        if self.center.size != 2:
            raise ConfigError("star-shaped polar graphs are planar")

    @classmethod
    def from_fourier(cls, center, coefficients):
        """coefficients = [a0, (a1, b1), (a2, b2), ...] of R(t) = a0 + sum a_j cos jt + b_j sin jt."""
        a0 = float(coefficients[0])
        harmonics = [tuple(map(float, c)) for c in coefficients[1:]]

        def radius(theta):
            out = np.full_like(np.asarray(theta, dtype=float), a0)
            for j, (a, b) in enumerate(harmonics, start=1):
                out = out + a * np.cos(j * theta) + b * np.sin(j * theta)
            return out

        samples = radius(np.linspace(0.0, 2.0 * np.pi, 721))
        if np.any(samples <= 0):
            raise ConfigError("star-shaped radius must stay positive")
        return cls(center, radius)

    def contains(self, points):
        d = np.atleast_2d(points) - self.center
        return np.hypot(d[:, 0], d[:, 1]) < self.radius_fn(np.arctan2(d[:, 1], d[:, 0]))

    def boundary(self, count):
        theta = 2.0 * np.pi * np.arange(count) / count
        R = self.radius_fn(theta)
        dR = (np.roll(R, -1) - np.roll(R, 1)) / (4.0 * np.pi / count)
        tangent = np.column_stack([dR * np.cos(theta) - R * np.sin(theta), dR * np.sin(theta) + R * np.cos(theta)])
        speed = np.linalg.norm(tangent, axis=1)
        normals = np.column_stack([tangent[:, 1], -tangent[:, 0]]) / speed[:, None]
        points = self.center + R[:, None] * np.column_stack([np.cos(theta), np.sin(theta)])
        return points, normals, speed * 2.0 * np.pi / count

    def bounding_box(self):
        pts = self.boundary(4096)[0]
        return pts.min(axis=0), pts.max(axis=0)

    def quadrature(self, spacing):
        r_max = float(self.radius_fn(np.linspace(0.0, 2.0 * np.pi, 721)).max())
        s, ws = _gauss(_count(r_max, spacing), 0.0, 1.0)
        n_theta = _count(2.0 * np.pi * r_max, spacing, 16)
        theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
        R = self.radius_fn(theta)
        ss, tt = np.meshgrid(s, theta, indexing="ij")
        rr = ss * R[None, :]
        w = (ws * s)[:, None] * (R ** 2)[None, :] * (2.0 * np.pi / n_theta)
        nodes = np.column_stack([(rr * np.cos(tt)).ravel(), (rr * np.sin(tt)).ravel()])
        return self.center + nodes, w.ravel()


class MollifiedPolygon(Shape):
    """Convex polygon whose corners are replaced by circular arcs of radius `rounding`."""

    def __init__(self, vertices, rounding):
        vertices = np.asarray(vertices, dtype=float)
        if vertices.ndim != 2 or vertices.shape[1] != 2 or vertices.shape[0] < 3:
            raise ConfigError("mollified polygons are planar with at least 3 vertices")
        if _signed_area(vertices) < 0:
            vertices = vertices[::-1]
        self.vertices = vertices
        self.rounding = float(rounding)
        self.n = 2
        edges = np.roll(vertices, -1, axis=0) - vertices
        self._normals = np.column_stack([edges[:, 1], -edges[:, 0]]) / np.linalg.norm(edges, axis=1)[:, None]
        prev = np.roll(self._normals, 1, axis=0)
        bisector = (prev + self._normals) / (1.0 + np.sum(prev * self._normals, axis=1))[:, None]
        self.core = vertices - self.rounding * bisector
        if _signed_area(self.core) <= 0:
            raise ConfigError("rounding radius too large for this polygon")
        self.center = self.core.mean(axis=0)
        self._polar = StarShape(self.center, self._ray_radius)

    @property
    def curvature(self):
        return 1.0 / self.rounding

    def corner_apexes(self):
        """Midpoints of the rounded corners and their outward normals."""
        prev = np.roll(self._normals, 1, axis=0)
        outward = prev + self._normals
        outward /= np.linalg.norm(outward, axis=1)[:, None]
        return self.core + self.rounding * outward, outward

    def _core_distance(self, points):
        a = self.core
        b = np.roll(self.core, -1, axis=0)
        ab = b - a
        ap = points[:, None, :] - a[None, :, :]
        t = np.clip(np.sum(ap * ab[None], axis=2) / np.sum(ab * ab, axis=1)[None], 0.0, 1.0)
        nearest = a[None] + t[..., None] * ab[None]
        dist = np.linalg.norm(points[:, None, :] - nearest, axis=2).min(axis=1)
        cross = ab[None, :, 0] * ap[..., 1] - ab[None, :, 1] * ap[..., 0]
        inside = np.all(cross >= 0, axis=1)
        return np.where(inside, 0.0, dist)

    def contains(self, points):
        return self._core_distance(np.atleast_2d(points)) < self.rounding

    def _ray_radius(self, theta):
        theta = np.asarray(theta, dtype=float)
        direction = np.column_stack([np.cos(theta.ravel()), np.sin(theta.ravel())])
        lo = np.zeros(direction.shape[0])
        hi = np.full(direction.shape[0], np.linalg.norm(self.vertices - self.center, axis=1).max() + self.rounding)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            inside = self.contains(self.center + direction * mid[:, None])
            lo = np.where(inside, mid, lo)
            hi = np.where(inside, hi, mid)
        return (0.5 * (lo + hi)).reshape(theta.shape)

    def boundary(self, count):
        k = self.core.shape[0]
        seg_len = np.linalg.norm(np.roll(self.core, -1, axis=0) - self.core, axis=1)
        prev = np.roll(self._normals, 1, axis=0)
        start = np.arctan2(prev[:, 1], prev[:, 0])
        sweep = np.mod(np.arctan2(self._normals[:, 1], self._normals[:, 0]) - start, 2.0 * np.pi)
        perimeter = seg_len.sum() + self.rounding * sweep.sum()
        step = perimeter / count
        pts, nrm, wts = [], [], []
        for i in range(k):
            m_arc = max(1, int(round(self.rounding * sweep[i] / step)))
            ang = start[i] + sweep[i] * (np.arange(m_arc) + 0.5) / m_arc
            normal = np.column_stack([np.cos(ang), np.sin(ang)])
            pts.append(self.core[i] + self.rounding * normal)
            nrm.append(normal)
            wts.append(np.full(m_arc, self.rounding * sweep[i] / m_arc))
            m_seg = max(1, int(round(seg_len[i] / step)))
            t = (np.arange(m_seg) + 0.5) / m_seg
            a, b = self.core[i], self.core[(i + 1) % k]
            pts.append(a + t[:, None] * (b - a) + self.rounding * self._normals[i])
            nrm.append(np.tile(self._normals[i], (m_seg, 1)))
            wts.append(np.full(m_seg, seg_len[i] / m_seg))
        return np.vstack(pts), np.vstack(nrm), np.concatenate(wts)

    def bounding_box(self):
        return self.core.min(axis=0) - self.rounding, self.core.max(axis=0) + self.rounding

    def quadrature(self, spacing):
        return self._polar.quadrature(spacing)


def _signed_area(vertices):
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _frame(normal):
    """Rotation taking e_n to the given unit normal."""
    normal = np.asarray(normal, dtype=float)
    normal = normal / np.linalg.norm(normal)
    if normal.size == 2:
        phi = math.atan2(-normal[0], normal[1])
        return np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
    e3 = np.array([0.0, 0.0, 1.0])
    v = np.cross(e3, normal)
    c = float(normal @ e3)
    if np.linalg.norm(v) < 1e-14:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    vx = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    return np.eye(3) + vx + vx @ vx / (1.0 + c)


class CappedBody(Shape):
    """{x_n > omega(x')} intersected with a bulk ball, placed with its apex at `apex`.

    In local coordinates the apex is the origin, the interior normal is e_n and
    the bulk ball is centred at (0, ..., R/2) with radius R, which contains the
    box B(0,b) x (-h,h) as soon as R > 2(b + h).
    """

    def __init__(self, cap, apex=None, normal=None, bulk_radius=None):
        self.cap = cap
        self.n = cap.n
        self.apex = np.zeros(self.n) if apex is None else np.asarray(apex, dtype=float)
        unit = np.eye(self.n)[-1] if normal is None else np.asarray(normal, dtype=float)
        self.normal = unit / np.linalg.norm(unit)
        self.rotation = _frame(self.normal)
        floor = 2.0 * (cap.b + cap.h)
        self.bulk_radius = float(bulk_radius) if bulk_radius is not None else 2.0 * floor
        if self.bulk_radius <= floor:
            raise ConfigError(f"bulk radius must exceed 2(b+h) = {floor:.6g}")
        self._bulk_center = np.zeros(self.n)
        self._bulk_center[-1] = 0.5 * self.bulk_radius

    def to_local(self, points):
        return (np.atleast_2d(points) - self.apex) @ self.rotation

    def to_world(self, local):
        return local @ self.rotation.T + self.apex

    def _top(self, xp):
        r2 = np.sum(xp * xp, axis=1)
        return self._bulk_center[-1] + np.sqrt(np.clip(self.bulk_radius ** 2 - r2, 0.0, None))

    def _bottom(self, xp):
        r2 = np.sum(xp * xp, axis=1)
        return self._bulk_center[-1] - np.sqrt(np.clip(self.bulk_radius ** 2 - r2, 0.0, None))

    def contains(self, points):
        y = self.to_local(points)
        in_bulk = np.linalg.norm(y - self._bulk_center, axis=1) < self.bulk_radius
        return in_bulk & (y[:, -1] > self.cap.omega(y[:, :-1]))

    def bounding_box(self):
        c = self.to_world(self._bulk_center[None, :])[0]
        return c - self.bulk_radius, c + self.bulk_radius

    def _radial_extent(self, direction):
        """Largest |x'| along a ray of x'-space where the graph is still below the bulk top."""
        R = self.bulk_radius

        def gap(r):
            xp = (r * direction)[None, :]
            return float(self.cap.omega(xp)[0] - self._top(xp)[0])

        r_hi = R * (1 - 1e-12)
        if gap(r_hi) < 0:
            return r_hi
        return brentq(gap, 0.0, r_hi, xtol=1e-14)

    def _lower_switch(self, direction, r_end):
        """Radius where the bulk bottom overtakes the graph, if any."""
        def gap(r):
            xp = (r * direction)[None, :]
            return float(self.cap.omega(xp)[0] - self._bottom(xp)[0])

        if gap(r_end) >= 0:
            return None
        return brentq(gap, 0.0, r_end, xtol=1e-14)

    def _column(self, xp_nodes, w_nodes, spacing):
        lower = np.maximum(self.cap.omega(xp_nodes), self._bottom(xp_nodes))
        upper = self._top(xp_nodes)
        height = np.clip(upper - lower, 0.0, None)
        t, wt = _gauss(_count(float(height.max()), spacing), 0.0, 1.0)
        xn = lower[:, None] + height[:, None] * t[None, :]
        nodes = np.concatenate([np.repeat(xp_nodes, t.size, axis=0), xn.reshape(-1, 1)], axis=1)
        weights = (w_nodes * height)[:, None] * wt[None, :]
        return nodes, weights.ravel()

    def quadrature(self, spacing):
        if self.n == 2:
            pieces = []
            for sign in (-1.0, 1.0):
                direction = np.array([sign])
                r_end = self._radial_extent(direction)
                cuts = [0.0, r_end]
                switch = self._lower_switch(direction, r_end)
                if switch is not None and 0.0 < switch < r_end:
                    cuts = [0.0, switch, r_end]
                for a, b in zip(cuts[:-1], cuts[1:]):
                    r, wr = _gauss(_count(b - a, spacing), a, b)
                    pieces.append(self._column(sign * r[:, None], wr, spacing))
        else:
            n_theta = _count(2.0 * np.pi * self.bulk_radius, spacing, 16)
            pieces = []
            for theta in 2.0 * np.pi * np.arange(n_theta) / n_theta:
                direction = np.array([math.cos(theta), math.sin(theta)])
                r_end = self._radial_extent(direction)
                cuts = [0.0, r_end]
                switch = self._lower_switch(direction, r_end)
                if switch is not None and 0.0 < switch < r_end:
                    cuts = [0.0, switch, r_end]
                for a, b in zip(cuts[:-1], cuts[1:]):
                    r, wr = _gauss(_count(b - a, spacing), a, b)
                    xp = r[:, None] * direction[None, :]
                    pieces.append(self._column(xp, wr * r * (2.0 * np.pi / n_theta), spacing))
        local = np.vstack([p[0] for p in pieces])
        weights = np.concatenate([p[1] for p in pieces])
        return self.to_world(local), weights

    def cap_box(self):
        return CapBox(self)

    def boundary(self, count):
        R = self.bulk_radius
        if self.n == 2:
            half = count // 2
            x = np.linspace(-R, R, half + 1)
            x = 0.5 * (x[1:] + x[:-1])
            graph = np.column_stack([x, self.cap.omega(x[:, None])])
            keep = np.linalg.norm(graph - self._bulk_center, axis=1) < R
            grad = self.cap.omega_gradient(x[:, None])[:, 0]
            g_norm = np.column_stack([grad, -np.ones_like(grad)]) / np.sqrt(1.0 + grad ** 2)[:, None]
            g_w = (x[1] - x[0]) * np.sqrt(1.0 + grad ** 2)
            theta = 2.0 * np.pi * (np.arange(count - half) + 0.5) / (count - half)
            ring = np.column_stack([np.cos(theta), np.sin(theta)])
            sphere = self._bulk_center + R * ring
            above = sphere[:, 1] > self.cap.omega(sphere[:, :1])
            pts = np.vstack([graph[keep], sphere[above]])
            nrm = np.vstack([g_norm[keep], ring[above]])
            wts = np.concatenate([g_w[keep], np.full(above.sum(), 2.0 * np.pi * R / (count - half))])
        else:
            side = int(math.sqrt(count // 2))
            r = R * (np.arange(side) + 0.5) / side
            theta = 2.0 * np.pi * np.arange(side) / side
            rr, tt = np.meshgrid(r, theta, indexing="ij")
            xp = np.column_stack([(rr * np.cos(tt)).ravel(), (rr * np.sin(tt)).ravel()])
            graph = np.column_stack([xp, self.cap.omega(xp)])
            keep = np.linalg.norm(graph - self._bulk_center, axis=1) < R
            grad = self.cap.omega_gradient(xp)
            lift = np.sqrt(1.0 + np.sum(grad * grad, axis=1))
            g_norm = np.column_stack([grad, -np.ones(xp.shape[0])]) / lift[:, None]
            g_w = rr.ravel() * (R / side) * (2.0 * np.pi / side) * lift
            dirs = fibonacci_sphere(count - side * side)
            sphere = self._bulk_center + R * dirs
            above = sphere[:, 2] > self.cap.omega(sphere[:, :2])
            pts = np.vstack([graph[keep], sphere[above]])
            nrm = np.vstack([g_norm[keep], dirs[above]])
            wts = np.concatenate([g_w[keep], np.full(above.sum(), 4.0 * np.pi * R * R / dirs.shape[0])])
        return self.to_world(pts), nrm @ self.rotation.T, wts


class CapBox(Shape):
    """Omega_{b,h}: the part of a capped body inside B(0,b) x (-h,h) in its local frame."""

    def __init__(self, body):
        self.body = body
        self.n = body.n

    def contains(self, points):
        y = self.body.to_local(points)
        cap = self.body.cap
        in_box = (np.sum(y[:, :-1] ** 2, axis=1) < cap.b ** 2) & (np.abs(y[:, -1]) < cap.h)
        return in_box & self.body.contains(points)

    def bounding_box(self):
        cap = self.body.cap
        corners = np.array(list(itertools.product(*[(-cap.b, cap.b)] * (self.n - 1), (-cap.h, cap.h))))
        world = self.body.to_world(corners)
        return world.min(axis=0), world.max(axis=0)

    def boundary(self, count):
        p, nrm, w = self.body.boundary(count)
        keep = self.contains(p - 1e-9 * nrm)
        return p[keep], nrm[keep], w[keep]

    def quadrature(self, spacing):
        x, w = self.body.quadrature(spacing)
        keep = self.contains(x)
        return x[keep], w[keep]


# --- domains ---

class Domain:
    def __init__(self, components, well_separated=False, name=None):
        components = list(components)
        if not components:
            raise ConfigError("a domain needs at least one component")
        dims = {c.n for c in components}
        if len(dims) != 1:
            raise ConfigError("all components must share one dimension")
        self.components = components
        self.n = dims.pop()
        self.well_separated = well_separated
        self.name = name

    def contains(self, points):
        points = np.atleast_2d(points)
        inside = np.zeros(points.shape[0], dtype=bool)
        for component in self.components:
            inside |= component.contains(points)
        return inside

    @cached_property
    def boundary_mesh(self):
        count = BOUNDARY_SAMPLES[self.n]
        pts, nrm, wts = [], [], []
        for i, component in enumerate(self.components):
            p, nr, w = component.boundary(count)
            keep = np.ones(p.shape[0], dtype=bool)
            for j, other in enumerate(self.components):
                if j != i:
                    keep &= ~other.contains(p)
            pts.append(p[keep])
            nrm.append(nr[keep])
            wts.append(w[keep])
        return np.vstack(pts), np.vstack(nrm), np.concatenate(wts)

    @cached_property
    def bounding_box(self):
        boxes = [c.bounding_box() for c in self.components]
        return np.min([b[0] for b in boxes], axis=0), np.max([b[1] for b in boxes], axis=0)

    @cached_property
    def diameter(self):
        points = self.boundary_mesh[0]
        if self.n == 1:
            return float(points.max() - points.min())
        hull = ConvexHull(points)
        return float(pdist(points[hull.vertices]).max())

    def quadrature(self, spacing):
        """Nodes and weights covering the union; earlier components win on overlaps."""
        nodes, weights = [], []
        for i, component in enumerate(self.components):
            x, w = component.quadrature(spacing)
            keep = np.ones(x.shape[0], dtype=bool)
            for earlier in self.components[:i]:
                keep &= ~earlier.contains(x)
            nodes.append(x[keep])
            weights.append(w[keep])
        return np.vstack(nodes), np.concatenate(weights)

    def min_gap(self):
        if len(self.components) < 2:
            return math.inf
        meshes = [c.boundary(BOUNDARY_SAMPLES[self.n])[0] for c in self.components]
        gap = math.inf
        for i, j in itertools.combinations(range(len(meshes)), 2):
            if np.any(self.components[j].contains(meshes[i])) or np.any(self.components[i].contains(meshes[j])):
                return 0.0
            d, _ = cKDTree(meshes[j]).query(meshes[i])
            gap = min(gap, float(d.min()))
        return gap

    def validate_separation(self, c1):
        gap = self.min_gap()
        if self.well_separated and gap <= 2.0 * c1:
            raise ConfigError(f"components flagged well separated have gap {gap:.4g} <= 2*C1 = {2 * c1:.4g}")
        return gap

    def caps(self):
        return [c for c in self.components if isinstance(c, CappedBody)]


def connected_to_infinity(p, domain, grid_resolution):
    """Flood fill of the complement grid from the bounding-box rim; True if a cell next to p is reached."""
    p = np.asarray(p, dtype=float)
    lo, hi = domain.bounding_box
    step = float(grid_resolution)
    lo = np.minimum(lo, p) - 3 * step
    hi = np.maximum(hi, p) + 3 * step
    shape = tuple(int(math.ceil((b - a) / step)) for a, b in zip(lo, hi))
    axes = [a + step * (np.arange(m) + 0.5) for a, m in zip(lo, shape)]
    centres = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, domain.n)
    complement = ~domain.contains(centres).reshape(shape)
    labels, _ = ndimage.label(complement)
    rim = set()
    for axis in range(domain.n):
        rim.update(np.unique(np.take(labels, 0, axis=axis)).tolist())
        rim.update(np.unique(np.take(labels, -1, axis=axis)).tolist())
    rim.discard(0)
    near = np.linalg.norm(centres - p, axis=1) <= 1.5 * step
    near_labels = labels.reshape(-1)[near & complement.reshape(-1)]
    if near_labels.size == 0:
        raise ResolutionTooCoarse(f"no complement cell within 1.5 cells of {p.tolist()}")
    return bool(np.isin(near_labels, list(rim)).any())
