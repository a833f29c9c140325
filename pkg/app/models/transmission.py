# app/models/transmission.py
"""Interior transmission eigenvalues of a ball with constant contrast, and boundary-vanishing diagnostics."""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import eval_legendre, jv, spherical_jn

from app.config import Config
from app.models.cgo import curvature_estimate_rhs
from app.models.geometry import Ball, Domain
from app.models.grid import sample
from app.models.holder_calculus import holder_norm
from app.models.mie_series import radial_function
from app.utils.errors import ConfigError, DomainError, NoneFound
from app.utils.logger import logger

SCAN_STEPS = 2048


@dataclass(frozen=True)
class RadialITP:
    R: float
    v0: float
    n: int = 2
    m: int = 0

    def __post_init__(self):
        if self.R <= 0:
            raise ConfigError("ball radius must be positive")
        if 1.0 + self.v0 <= 0:
            raise ConfigError("refractive index 1 + v0 must be positive")
        if self.v0 == 0:
            raise ConfigError("v0 = 0 makes the transmission determinant vanish identically")
        if self.n not in (2, 3) or self.m < 0:
            raise ConfigError("radial transmission problems need n in {2, 3} and a non-negative mode")

    @property
    def index(self):
        return math.sqrt(1.0 + self.v0)

    def domain(self):
        return Domain([Ball(np.zeros(self.n), self.R)])


def itp_determinant(itp, k, m=None):
    """det [[J_m(kR), J_m(k1 R)], [k J_m'(kR), k1 J_m'(k1 R)]], spherical Bessel functions in 3D."""
    if k <= 0:
        raise DomainError("transmission determinant needs k > 0")
    m = itp.m if m is None else m
    k1 = k * itp.index
    x, x1 = k * itp.R, k1 * itp.R
    return float(radial_function(itp.n, m, x, "j") * k1 * radial_function(itp.n, m, x1, "j", True)
                 - k * radial_function(itp.n, m, x, "j", True) * radial_function(itp.n, m, x1, "j"))


def _second_derivative(n, m, x):
    """f'' from recurrences, without using the radial ODE."""
    if n == 2:
        return 0.25 * (jv(m - 2, x) - 2.0 * jv(m, x) + jv(m + 2, x))
    if m == 0:
        return -spherical_jn(1, x, derivative=True)
    return (spherical_jn(m - 1, x, derivative=True) - (m + 1) / x * spherical_jn(m, x, derivative=True)
            + (m + 1) / (x * x) * spherical_jn(m, x))


@dataclass(frozen=True)
class EigenPair:
    """w = a f(k r), u = b f(k1 r) times the angular factor of mode m."""
    k_eig: float
    m: int
    itp: RadialITP
    a: float
    b: float

    @property
    def k1(self):
        return self.k_eig * self.itp.index

    def w(self, r):
        return self.a * radial_function(self.itp.n, self.m, self.k_eig * np.asarray(r, dtype=float), "j")

    def u(self, r):
        return self.b * radial_function(self.itp.n, self.m, self.k1 * np.asarray(r, dtype=float), "j")

    def w_prime(self, r):
        return self.a * self.k_eig * radial_function(self.itp.n, self.m, self.k_eig * np.asarray(r), "j", True)

    def u_prime(self, r):
        return self.b * self.k1 * radial_function(self.itp.n, self.m, self.k1 * np.asarray(r), "j", True)

    def angular(self, points):
        if self.itp.n == 2:
            return np.exp(1j * self.m * np.arctan2(points[:, 1], points[:, 0]))
        r = np.linalg.norm(points, axis=1)
        return eval_legendre(self.m, np.divide(points[:, 2], r, out=np.ones_like(r), where=r > 0))

    def field_u(self, points):
        points = np.atleast_2d(points)
        return self.u(np.linalg.norm(points, axis=1)) * self.angular(points)

    def field_w(self, points):
        points = np.atleast_2d(points)
        return self.w(np.linalg.norm(points, axis=1)) * self.angular(points)

    def ode_residuals(self, radii=None):
        """Relative residuals of the radial Helmholtz ODE for w (wavenumber k) and u (wavenumber k1)."""
        n, m = self.itp.n, self.m
        r = np.linspace(0.05, 1.0, 200) * self.itp.R if radii is None else np.asarray(radii, dtype=float)
        out = []
        for kappa in (self.k_eig, self.k1):
            x = kappa * r
            f = radial_function(n, m, x, "j")
            df = radial_function(n, m, x, "j", True)
            d2f = _second_derivative(n, m, x)
            centrifugal = m * m if n == 2 else m * (m + 1)
            residual = d2f + (n - 1) / x * df + (1.0 - centrifugal / (x * x)) * f
            scale = max(float(np.max(np.abs(f))), float(np.max(np.abs(d2f))), 1e-300)
            out.append(float(np.max(np.abs(residual))) / scale)
        return tuple(out)

    def boundary_mismatch(self):
        R = self.itp.R
        return float(abs(self.u(R) - self.w(R)) + abs(self.u_prime(R) - self.w_prime(R)))

    def scaled(self, factor):
        return replace(self, a=self.a * factor, b=self.b * factor)

    def holder_norm(self, alpha, spacing=None):
        domain = self.itp.domain()
        f = sample(self.field_u, domain, spacing or self.itp.R / 48.0, alpha=alpha)
        return holder_norm(f, alpha)

    def normalize(self, alpha=0.5, spacing=None):
        """Scale so the discrete C^alpha norm of u over the ball is 1."""
        return self.scaled(1.0 / self.holder_norm(alpha, spacing))


def _pair_at(itp, m, k):
    R = itp.R
    a = float(radial_function(itp.n, m, k * itp.index * R, "j"))
    b = float(radial_function(itp.n, m, k * R, "j"))
    if abs(a) + abs(b) < 1e-12:
        # both traces vanish: match the derivatives instead
        a = float(itp.index * radial_function(itp.n, m, k * itp.index * R, "j", True))
        b = float(radial_function(itp.n, m, k * R, "j", True))
    return EigenPair(k_eig=float(k), m=m, itp=itp, a=a, b=b)


def _roots_for_mode(itp, k_max, m, steps):
    grid = k_max * np.arange(1, steps + 1) / steps
    values = np.array([itp_determinant(itp, k, m) for k in grid])
    roots = []
    for i in range(steps - 1):
        if values[i] == 0.0:
            roots.append(float(grid[i]))
        elif values[i] * values[i + 1] < 0:
            roots.append(brentq(lambda k: itp_determinant(itp, k, m), grid[i], grid[i + 1],
                                xtol=1e-14, rtol=4 * np.finfo(float).eps))
    return [_pair_at(itp, m, k) for k in roots]


def find_eigenvalues(itp, k_max, modes=None, steps=SCAN_STEPS):
    if k_max <= 0:
        raise ConfigError("k_max must be positive")
    modes = [itp.m] if modes is None else [int(m) for m in modes]
    with ThreadPoolExecutor(max_workers=Config.THREADS) as pool:
        per_mode = list(pool.map(lambda m: _roots_for_mode(itp, k_max, m, steps), modes))
    pairs = [pair for group in per_mode for pair in group]
    if not pairs:
        raise NoneFound(f"no transmission eigenvalue below k = {k_max:g} for modes {modes}")
    logger.info(f"Found {len(pairs)} transmission eigenvalues below {k_max:g}")
    return pairs


def boundary_vanishing_ratio(pair, itp, alpha, contrast_norm_ratio=1.0, spacing=None):
    """sup over the sphere of |u| divided by (2R)^alpha ||V||_{C^alpha} / inf|V|, u normalised first.

    The contrast is constant here, so the norm ratio defaults to 1.
    """
    normalized = pair.normalize(alpha, spacing)
    boundary_value = abs(float(normalized.u(itp.R)))
    return boundary_value / ((2.0 * itp.R) ** alpha * contrast_norm_ratio)


class VanishingCheck(NamedTuple):
    value: float
    envelope: float
    K: float

    @property
    def satisfied(self):
        return self.value <= self.envelope


def curvature_vanishing_check(domain, V, k_eig, u, alpha, spacing=None):
    """|u(p)| at the cap apex next to the curvature envelope scaled by ||V||_{C^alpha} / |V(p)|.

    u is normalised to unit C^alpha norm over Omega_{b,h} before it is evaluated at the apex.
    """
    caps = domain.caps()
    if not caps:
        raise ConfigError("the curvature check needs a domain with a capped component")
    body = caps[0]
    cap = body.cap
    box = Domain([body.cap_box()])
    spacing = spacing or cap.b / 24.0
    u_norm = holder_norm(sample(u, box, spacing, alpha=alpha), alpha)
    v_norm = holder_norm(sample(V, box, spacing, alpha=alpha), alpha)
    p = body.apex[None, :]
    v_apex = abs(complex(np.asarray(V(p)).ravel()[0]))
    if v_apex == 0:
        raise ConfigError("the contrast vanishes at the apex")
    value = abs(complex(np.asarray(u(p)).ravel()[0])) / u_norm if u_norm else 0.0
    envelope = curvature_estimate_rhs(cap.K, alpha, cap.delta, cap.L, cap.M, cap.n, k_eig) * v_norm / v_apex
    return VanishingCheck(float(value), float(envelope), cap.K)
