# app/models/quadrature_oracle.py
"""Brute-force adaptive integration over the regions the closed forms talk about.

Every region is pulled back to the unit cube [0,1]^d (d = n for solid regions,
d = n-1 for flat slices) and handed to scipy's adaptive tensor Gauss-Kronrod
cubature. Pieces are summed in a fixed order with math.fsum so results are
reproducible bit for bit. Sampled integrands, whose interpolants have kinks on
their grid lines, get a fixed Gauss rule split at those lines instead.
"""
import math
from dataclasses import dataclass, field

import numpy as np
import scipy
from packaging.version import Version
from scipy.optimize import brentq

from app.config import Config
from app.utils.errors import BudgetExceeded, ConfigError
from app.utils.logger import logger

MIN_SCIPY = Version("1.15")

if Version(scipy.__version__) < MIN_SCIPY:
    raise ImportError(f"the quadrature oracle needs scipy >= {MIN_SCIPY} for integrate.cubature, "
                      f"found {scipy.__version__}")

from scipy.integrate import cubature  # noqa: E402

_RULES = {1: ("gk21", 21), 2: ("gk21", 21), 3: ("gk15", 15)}


@dataclass(eq=False)
class Region:
    kind: str
    n: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise ConfigError(f"regions are supported for n in 1..3, got {self.n}")

    # --- constructors ---
    @classmethod
    def ball(cls, center, radius):
        center = np.asarray(center, dtype=float)
        if radius <= 0:
            raise ConfigError("ball radius must be positive")
        return cls("ball", center.size, {"center": center, "radius": float(radius)})

    @classmethod
    def box(cls, lo, hi):
        lo, hi = np.atleast_1d(np.asarray(lo, dtype=float)), np.atleast_1d(np.asarray(hi, dtype=float))
        if lo.shape != hi.shape or np.any(hi <= lo):
            raise ConfigError("box needs lo < hi componentwise")
        return cls("box", lo.size, {"lo": lo, "hi": hi})

    @classmethod
    def paraboloid_cap(cls, K, n, h=None, floor=0.0, decay=None):
        """{x : K|x'|^2 < x_n, floor <= x_n < h}; h=None means unbounded, which needs |f| <= e^{-decay x_n}."""
        if K <= 0:
            raise ConfigError("paraboloid curvature K must be positive")
        if h is None and (decay is None or decay <= 0):
            raise ConfigError("an unbounded paraboloid needs a positive decay rate")
        if h is not None and h <= floor:
            raise ConfigError("paraboloid height must exceed its floor")
        return cls("paraboloid_cap", n, {"K": float(K), "h": h, "floor": float(floor), "decay": decay})

    @classmethod
    def annular_paraboloid(cls, K_minus, K_plus, h, n):
        if not 0 < K_minus <= K_plus or h <= 0:
            raise ConfigError("annular paraboloid needs 0 < K_minus <= K_plus and h > 0")
        return cls("annular_paraboloid", n, {"K_minus": float(K_minus), "K_plus": float(K_plus), "h": float(h)})

    @classmethod
    def graph_cap(cls, omega, b, h, n):
        """{|x'| < b, omega(x') < x_n < h}; omega maps (N, n-1) arrays to (N,)."""
        if b <= 0 or h <= 0:
            raise ConfigError("graph cap needs b, h > 0")
        return cls("graph_cap", n, {"omega": omega, "b": float(b), "h": float(h)})

    @classmethod
    def flat_slice(cls, omega, b, h, n):
        """The top face {x' : omega(x') < h, |x'| < b} x {h}, integrated against surface measure."""
        if b <= 0 or h <= 0:
            raise ConfigError("flat slice needs b, h > 0")
        return cls("flat_slice", n, {"omega": omega, "b": float(b), "h": float(h)})

    # --- pull-backs to the unit cube ---
    def pieces(self, tol):
        return getattr(self, f"_pieces_{self.kind}")(tol)

    def _pieces_box(self, tol):
        lo, hi = self.params["lo"], self.params["hi"]
        volume = float(np.prod(hi - lo))

        def mapper(u):
            return lo + (hi - lo) * u, np.full(u.shape[0], volume)
        return [(self.n, mapper)]

    def _pieces_ball(self, tol):
        c, R = self.params["center"], self.params["radius"]
        if self.n == 1:
            return Region.box(c - R, c + R).pieces(tol)

        def mapper(u):
            r = R * u[:, 0]
            theta = 2.0 * np.pi * u[:, -1]
            if self.n == 2:
                x = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
                return c + x, 2.0 * np.pi * R * r
            z = 1.0 - 2.0 * u[:, 1]
            s = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
            x = np.column_stack([r * s * np.cos(theta), r * s * np.sin(theta), r * z])
            return c + x, 4.0 * np.pi * R * r * r
        return [(self.n, mapper)]

    def _pieces_paraboloid_cap(self, tol):
        K, floor = self.params["K"], self.params["floor"]
        top = self.params["h"]
        if top is None:
            top = truncation_height(self.params["decay"], K, floor, self.n, tol)
        n = self.n

        def mapper(u):
            t = u[:, 0]
            xn = floor + (top - floor) * t * t
            dxn = 2.0 * (top - floor) * t
            rho = np.sqrt(xn / K)
            if n == 2:
                x1 = rho * (2.0 * u[:, 1] - 1.0)
                return np.column_stack([x1, xn]), dxn * 2.0 * rho
            r = rho * u[:, 1]
            theta = 2.0 * np.pi * u[:, 2]
            x = np.column_stack([r * np.cos(theta), r * np.sin(theta), xn])
            return x, dxn * rho * r * 2.0 * np.pi
        return [(n, mapper)]

    def _pieces_annular_paraboloid(self, tol):
        Km, Kp, h = self.params["K_minus"], self.params["K_plus"], self.params["h"]
        n = self.n

        def radii(t):
            xn = h * t * t
            return xn, 2.0 * h * t, np.sqrt(xn / Kp), np.sqrt(xn / Km)

        if n == 2:
            def side(sign):
                def mapper(u):
                    xn, dxn, r_in, r_out = radii(u[:, 0])
                    x1 = sign * (r_in + (r_out - r_in) * u[:, 1])
                    return np.column_stack([x1, xn]), dxn * (r_out - r_in)
                return mapper
            return [(2, side(-1.0)), (2, side(1.0))]

        def mapper(u):
            xn, dxn, r_in, r_out = radii(u[:, 0])
            r = r_in + (r_out - r_in) * u[:, 1]
            theta = 2.0 * np.pi * u[:, 2]
            x = np.column_stack([r * np.cos(theta), r * np.sin(theta), xn])
            return x, dxn * (r_out - r_in) * r * 2.0 * np.pi
        return [(3, mapper)]

    def _pieces_graph_cap(self, tol):
        omega, b, h = self.params["omega"], self.params["b"], self.params["h"]
        if self.n == 2:
            lo, hi = interval_extent(omega, b, h)

            def mapper(u):
                x1 = lo + (hi - lo) * u[:, 0]
                w = omega(x1[:, None])
                xn = w + (h - w) * u[:, 1]
                return np.column_stack([x1, xn]), (hi - lo) * (h - w)
            return [(2, mapper)]

        def mapper(u):
            theta = 2.0 * np.pi * u[:, 1]
            direction = np.column_stack([np.cos(theta), np.sin(theta)])
            r_max = ray_extent(omega, direction, b, h)
            xp = direction * (r_max * u[:, 0])[:, None]
            w = omega(xp)
            xn = w + (h - w) * u[:, 2]
            return np.column_stack([xp, xn]), 2.0 * np.pi * r_max ** 2 * u[:, 0] * (h - w)
        return [(3, mapper)]

    def _pieces_flat_slice(self, tol):
        omega, b, h = self.params["omega"], self.params["b"], self.params["h"]
        if self.n == 2:
            lo, hi = interval_extent(omega, b, h)

            def mapper(u):
                x1 = lo + (hi - lo) * u[:, 0]
                return np.column_stack([x1, np.full_like(x1, h)]), np.full(u.shape[0], hi - lo)
            return [(1, mapper)]

        def mapper(u):
            theta = 2.0 * np.pi * u[:, 1]
            direction = np.column_stack([np.cos(theta), np.sin(theta)])
            r_max = ray_extent(omega, direction, b, h)
            xp = direction * (r_max * u[:, 0])[:, None]
            return np.column_stack([xp, np.full(u.shape[0], h)]), 2.0 * np.pi * r_max ** 2 * u[:, 0]
        return [(2, mapper)]


def interval_extent(omega, b, h):
    """Endpoints of {|x| < b : omega(x) < h} on the line, assuming it is an interval around 0."""
    def g(x):
        return float(omega(np.array([[x]]))[0]) - h

    lo = -b if g(-b) < 0 else brentq(g, -b, 0.0, xtol=1e-15)
    hi = b if g(b) < 0 else brentq(g, 0.0, b, xtol=1e-15)
    return lo, hi


def ray_extent(omega, direction, b, h, iterations=60):
    """Radius where omega first reaches h along each ray, clipped to b (vectorised bisection)."""
    count = direction.shape[0]
    lo = np.zeros(count)
    hi = np.full(count, b)
    inside = omega(direction * b) < h
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        below = omega(direction * mid[:, None]) < h
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return np.where(inside, b, 0.5 * (lo + hi))


def truncation_height(decay, K, floor, n, tol):
    from app.models.cgo import cgo_tail_bound

    target = 1e-3 * tol
    top = floor + math.log(1e3 / tol) / decay
    for _ in range(400):
        if cgo_tail_bound(decay, K, top, n) <= target:
            return top
        top += 1.0 / decay
    raise BudgetExceeded(f"could not truncate paraboloid with decay {decay}")


def integrate(f, region, tol=1e-10, budget=None, scale=1.0):
    """Adaptive integral of a vectorised complex field f over region.

    Stops when the estimated error is below tol*(scale + |I|) on both the
    real and imaginary parts; raises BudgetExceeded otherwise.
    """
    budget = budget or Config.WORK_BUDGET
    pieces = region.pieces(tol)
    real_parts, imag_parts = [], []
    for dim, mapper in pieces:
        rule, points = _RULES[dim]
        per_box = points ** dim

        def integrand(u, mapper=mapper):
            x, jac = mapper(u)
            values = np.asarray(f(x), dtype=complex) * jac
            return np.column_stack([values.real, values.imag])

        max_subdivisions = max(1, budget // (per_box * len(pieces)))
        result = cubature(integrand, np.zeros(dim), np.ones(dim), rule=rule,
                          rtol=tol, atol=tol * scale, max_subdivisions=max_subdivisions)
        if result.status != "converged":
            logger.warning(f"Quadrature over {region.kind} stopped after {result.subdivisions} subdivisions")
            raise BudgetExceeded(
                f"tolerance {tol:g} unreachable over {region.kind} within {budget} evaluations")
        real_parts.append(float(result.estimate[0]))
        imag_parts.append(float(result.estimate[1]))
    return complex(math.fsum(real_parts), math.fsum(imag_parts))


# --- fixed rules for sampled integrands ---

def _breaks(nodes, lo, hi):
    return np.unique(np.concatenate([[lo, hi], nodes[(nodes > lo) & (nodes < hi)]]))


def _panel_rule(breaks, order):
    t, wt = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(breaks)
    x = (0.5 * (breaks[:-1] + breaks[1:]))[:, None] + half[:, None] * t
    return x.ravel(), (half[:, None] * wt).ravel()


def _clipped_panel_rule(nodes, lower, upper, order):
    """Gauss nodes on [lower_i, upper_i] for every row i, panels split at the grid nodes."""
    upper = np.maximum(upper, lower)
    breaks = _breaks(nodes, float(lower.min()), float(upper.max()))
    a = np.clip(breaks[None, :-1], lower[:, None], upper[:, None])
    b = np.clip(breaks[None, 1:], lower[:, None], upper[:, None])
    t, wt = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (b - a)
    x = (0.5 * (a + b))[:, :, None] + half[:, :, None] * t
    w = half[:, :, None] * wt
    return x.reshape(lower.size, -1), w.reshape(lower.size, -1)


def _section_extent(omega, x1, b, h, iterations=60):
    """Ends of {x2 : omega(x1, x2) < h} around x2 = 0 for every x1 (vectorised bisection)."""
    ends = []
    for sign in (-1.0, 1.0):
        lo = np.zeros_like(x1)
        hi = np.full_like(x1, b)
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            below = omega(np.column_stack([x1, sign * mid])) < h
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        ends.append(sign * 0.5 * (lo + hi))
    return ends


def graph_cap_rule(omega, b, h, n, axes, order=4):
    """Points and weights of a Gauss rule on {|x'| < b, omega(x') < x_n < h}.

    Panels break at the grid lines in axes, so a piecewise polynomial
    interpolant on that grid is a polynomial on every panel. Slices of
    {omega < h} are taken to be intervals through the axis.
    """
    axes = [np.asarray(a, dtype=float) for a in axes]
    if len(axes) != n:
        raise ConfigError("grid and region dimensions differ")
    if n == 2:
        lo, hi = interval_extent(omega, b, h)
        x1, weights = _panel_rule(_breaks(axes[0], lo, hi), order)
        prefix = x1[:, None]
    elif n == 3:
        lo, hi = interval_extent(lambda x: omega(np.column_stack([x[:, 0], np.zeros(x.shape[0])])), b, h)
        x1, w1 = _panel_rule(_breaks(axes[0], lo, hi), order)
        lo2, hi2 = _section_extent(omega, x1, b, h)
        x2, w2 = _clipped_panel_rule(axes[1], lo2, hi2, order)
        prefix = np.column_stack([np.repeat(x1, x2.shape[1]), x2.ravel()])
        weights = (w1[:, None] * w2).ravel()
        keep = weights > 0
        prefix, weights = prefix[keep], weights[keep]
    else:
        raise ConfigError(f"graph caps are supported for n in 2..3, got {n}")
    floor = omega(prefix)
    xn, wn = _clipped_panel_rule(axes[-1], floor, np.full_like(floor, h), order)
    points = np.column_stack([np.repeat(prefix, xn.shape[1], axis=0), xn.ravel()])
    weights = (weights[:, None] * wn).ravel()
    keep = weights > 0
    return points[keep], weights[keep]
