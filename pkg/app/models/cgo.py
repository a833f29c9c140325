# app/models/cgo.py
"""Complex geometrical optics (CGO) integrals over paraboloids and the curvature estimates built on them.

A CGO field is u0(x) = exp(rho . x) with rho . rho = 0 (bilinear, not Hermitian),
so it is harmonic. The canonical choice is rho = i tau e_1 - tau e_n, which decays
like exp(-tau x_n) into the upper half space.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from app.models.grid import GridField
from app.models.quadrature_oracle import Region, graph_cap_rule, integrate
from app.models.specfun import lower_incomplete_gamma, sphere_measure
from app.utils.errors import ConfigError, DomainError, PrecondViolated
from app.utils.logger import logger

ENVELOPE_CONSTANT = 4.0


@dataclass(frozen=True, eq=False)
class CgoVector:
    rho: np.ndarray
    tau: float

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        object.__setattr__(self, "rho", rho)
        scale = float(np.sum(np.abs(rho) ** 2))
        if abs(np.sum(rho * rho)) > 1e-12 * max(scale, 1.0):
            raise ConfigError("CGO vectors need rho . rho = 0")
        if self.tau <= 0:
            raise ConfigError("tau must be positive")

    @classmethod
    def canonical(cls, tau, n):
        rho = np.zeros(n, dtype=complex)
        rho[0] = 1j * tau
        rho[-1] = -tau
        return cls(rho, float(tau))

    @property
    def n(self):
        return self.rho.size

    def __call__(self, x):
        return np.exp(np.atleast_2d(x) @ self.rho)

    def gradient(self, x):
        return self(x)[:, None] * self.rho[None, :]


def _rho(rho):
    return rho.rho if isinstance(rho, CgoVector) else np.asarray(rho, dtype=complex)


def cgo_over_parabola(rho, K, n=None):
    """int over {x_n > K|x'|^2} of exp(rho . x), principal branch of every power."""
    rho = _rho(rho)
    n = n or rho.size
    rho_n = complex(rho[-1])
    if rho_n.real >= 0:
        raise DomainError("the paraboloid integral diverges unless Re rho_n < 0")
    if K <= 0:
        raise DomainError("K must be positive")
    rho_p = rho[:-1]
    quad = complex(np.sum(rho_p * rho_p))
    base = np.pi / (-rho_n * K)
    return complex((1.0 / -rho_n) * base ** ((n - 1) / 2.0) * np.exp(-quad / (4.0 * rho_n * K)))


def cgo_tail_bound(tau, K, h, n):
    """Upper bound for int over {x_n > max(h, K|x'|^2)} of exp(-tau x_n)."""
    if tau <= 0 or K <= 0 or h <= 0:
        raise DomainError("tail bound needs tau, K, h > 0")
    half = (n + 1) / 2.0
    c_n = max(1.0, 2.0 ** (half - 2.0)) * max(math.gamma(half), 1.0) * sphere_measure(n - 2) / (n - 1)
    return c_n * (1.0 + (tau * h) ** ((n - 1) / 2.0)) / (tau ** half * K ** ((n - 1) / 2.0)) * math.exp(-tau * h)


def cgo_sliced(tau, K_minus, K_plus, h, n):
    """Exact int over {K_plus|x'|^2 ... K_minus|x'|^2 shell below h} of exp(-tau x_n)."""
    if not 0 < K_minus <= K_plus:
        raise DomainError("cgo_sliced needs 0 < K_minus <= K_plus")
    if tau <= 0 or h <= 0:
        raise DomainError("cgo_sliced needs tau, h > 0")
    s = (n - 1) / 2.0
    shell = (1.0 / K_minus) ** s - (1.0 / K_plus) ** s
    radial = tau ** (-(n + 1) / 2.0) * lower_incomplete_gamma(tau * h, (n + 1) / 2.0)
    return sphere_measure(n - 2) / (n - 1) * shell * radial


def cgo_weighted_cap_bound(tau, K, h, s, n):
    if tau <= 0 or K <= 0 or h <= 0 or s < 0:
        raise DomainError("weighted cap bound needs tau, K, h > 0 and s >= 0")
    constant = sphere_measure(n - 2) / (1.0 + s / 2.0)
    return constant * (h + 1.0 / K) ** (s / 2.0) * h ** ((n + s + 1) / 2.0) * K ** (-(n - 1) / 2.0)


def complex_gaussian_integral(A, B):
    """int over R of exp(A t^2 + B t) for Re A < 0."""
    A, B = complex(A), complex(B)
    if A.real >= 0:
        raise DomainError("complex Gaussian needs Re A < 0")
    return complex(np.sqrt(-np.pi / A) * np.exp(-B * B / (4.0 * A)))


class SplitTerms(NamedTuple):
    lhs: complex
    I1: complex
    I2: complex
    I3: complex
    I4: complex
    phi0: complex

    @property
    def residual(self):
        return self.lhs - (self.phi0 * (self.I1 + self.I2) + self.I3 + self.I4)

    def to_dict(self):
        out = {name: getattr(self, name) for name in self._fields}
        out["residual"] = self.residual
        return out


def _check_cap_field(w, phi, cap, k, pde_tol, samples=400):
    rng = np.random.default_rng(7)
    n = cap.n
    xp = (2.0 * rng.random((samples, n - 1)) - 1.0) * cap.b / math.sqrt(n - 1)
    floor = cap.omega(xp)
    keep = floor < cap.h
    xp, floor = xp[keep], floor[keep]
    xn = floor + (cap.h - floor) * rng.random(xp.shape[0])
    interior = np.column_stack([xp, xn])
    lhs = w.laplacian(interior) + k * k * w(interior)
    rhs = phi(interior)
    scale = float(np.max(np.abs(rhs))) + 1.0
    pde = float(np.max(np.abs(lhs - rhs))) / scale
    if pde > pde_tol:
        logger.warning(f"Identity split rejected: PDE residual {pde:.3e}")
        raise PrecondViolated(f"(Delta + k^2) w differs from phi by {pde:.3e} (relative)")
    graph = np.column_stack([xp, floor])
    trace = float(np.max(np.abs(w(graph))) + np.max(np.abs(w.gradient(graph))))
    if trace > 1e-8 * scale:
        raise PrecondViolated(f"w and its gradient do not vanish on the boundary graph (max {trace:.3e})")


def identity_split_terms(w, phi, cap, rho, k, tol=1e-10, pde_tol=0.05, budget=None):
    """phi(0) int_{C_inf} u0 = phi(0)(I1 + I2) + I3 + I4 on the cap box Omega_{b,h}.

    I1 is the paraboloid above h, I2 the paraboloid below h minus Omega_{b,h},
    I3 the Holder remainder inside Omega_{b,h} and I4 the flux through the top slice.
    A sampled phi (GridField) enters I3 through a Gauss rule split at its grid
    lines, so the residual measures the interpolation error of phi.
    """
    if not isinstance(rho, CgoVector):
        rho = CgoVector(rho, float(-np.real(np.asarray(rho)[-1])))
    n = cap.n
    if rho.n != n:
        raise ConfigError("CGO vector and cap dimensions differ")
    if np.any(np.abs(rho.rho[:-1].real) > 0):
        raise PrecondViolated("identity split needs Re rho' = 0 so the CGO field decays upward")
    _check_cap_field(w, phi, cap, k, pde_tol)

    origin = np.zeros((1, n))
    phi0 = complex(np.asarray(phi(origin)).ravel()[0])
    w0 = complex(np.asarray(w(origin)).ravel()[0])
    decay = -rho.rho[-1].real
    L = cgo_over_parabola(rho, cap.K, n)
    scale = abs(L)

    above = Region.paraboloid_cap(cap.K, n, floor=cap.h, decay=decay)
    below = Region.paraboloid_cap(cap.K, n, h=cap.h)
    inside = Region.graph_cap(cap.omega, cap.b, cap.h, n)
    top = Region.flat_slice(cap.omega, cap.b, cap.h, n)

    I1 = integrate(rho, above, tol, budget, scale)
    I2 = integrate(rho, below, tol, budget, scale) - integrate(rho, inside, tol, budget, scale)

    def remainder(x):
        return -rho(x) * (phi(x) - phi0 - k * k * (w(x) - w0))

    def flux(x):
        return rho(x) * (w.gradient(x)[:, -1] - rho.rho[-1] * w(x))

    if isinstance(phi, GridField):
        points, weights = graph_cap_rule(cap.omega, cap.b, cap.h, n, phi.axes)
        I3 = complex(np.dot(weights, remainder(points)))
    else:
        I3 = integrate(remainder, inside, tol, budget, scale)
    I4 = integrate(flux, top, tol, budget, scale)
    terms = SplitTerms(phi0 * L, I1, I2, I3, I4, phi0)
    logger.info(f"Identity split K={cap.K:g} tau={rho.tau:g}: residual {abs(terms.residual):.3e}")
    return terms


# --- the assembled curvature estimate ---

def _check_estimate_args(K, alpha, delta):
    if np.any(np.asarray(K) < math.e):
        raise DomainError("curvature estimates need K >= e")
    if not 0 < alpha < 1 or delta <= 0:
        raise DomainError("curvature estimates need 0 < alpha < 1 and delta > 0")


def _norm_scale(norms):
    norms = norms or {}
    return max(1.0, float(norms.get("phi_Calpha", 1.0)), float(norms.get("w_C1beta", 1.0)))


def curvature_estimate_rhs(K, alpha, delta, L, M, n, k, norms=None):
    """Four-term upper bound at gamma = min(alpha, delta)/2 and beta = 1 - min(alpha, delta).

    L, M and k only enter through constants that this form absorbs; see
    curvature_estimate_terms for the version that keeps them.
    """
    _check_estimate_args(K, alpha, delta)
    m = min(alpha, delta)
    gamma, beta = m / 2.0, 1.0 - m
    K = np.asarray(K, dtype=float)
    log_k = np.log(K)
    value = (log_k ** ((n - 1) / 2.0) * K ** (-3.0 * gamma)
             + K ** (gamma - delta)
             + log_k ** 1.5 * K ** (1.0 - n / 2.0 - alpha + gamma)
             + log_k ** ((n + 3) / 2.0) * K ** (1.0 - beta - 3.0 * gamma))
    value = _norm_scale(norms) * value
    return float(value) if value.ndim == 0 else value


class EstimateTerms(NamedTuple):
    tau: float
    paraboloid: float
    sliced: float
    holder: float
    flux: float

    @property
    def total(self):
        return self.paraboloid + self.sliced + self.holder + self.flux


def curvature_estimate_terms(K, alpha, delta, L, M, n, k, norms=None):
    """The four estimate terms before simplification, with tau = 4 gamma K ln K."""
    _check_estimate_args(K, alpha, delta)
    norms = norms or {}
    phi_norm = float(norms.get("phi_Calpha", 1.0))
    w_norm = float(norms.get("w_C1beta", 1.0))
    m = min(alpha, delta)
    gamma, beta = m / 2.0, 1.0 - m
    s = (n - 1) / 2.0
    log_k = math.log(K)
    return EstimateTerms(
        tau=4.0 * gamma * K * log_k,
        paraboloid=(1.0 + (4.0 * gamma * log_k) ** s) * K ** (-3.0 * gamma),
        sliced=L * s * M ** (s + 1.0) * K ** (gamma - delta),
        holder=(phi_norm + k * k * w_norm) * (4.0 * gamma * log_k) ** 1.5 * K ** (1.0 - n / 2.0 - alpha + gamma),
        flux=w_norm * (4.0 * gamma * log_k) ** ((n + 1) / 2.0) * (1.0 + 4.0 * gamma * log_k)
        * K ** (1.0 - beta - 3.0 * gamma),
    )


def curvature_envelope(K, alpha, delta, n, norms=None):
    _check_estimate_args(K, alpha, delta)
    m = min(alpha, delta)
    K = np.asarray(K, dtype=float)
    value = ENVELOPE_CONSTANT * _norm_scale(norms) * np.log(K) ** ((n + 3) / 2.0) * K ** (-m / 2.0)
    return float(value) if value.ndim == 0 else value


def decay_threshold(alpha, delta, n):
    """The envelope decreases for K above this value."""
    return math.exp((n + 3) / min(alpha, delta))
