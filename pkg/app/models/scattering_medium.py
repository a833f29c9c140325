# app/models/scattering_medium.py
"""Medium scattering through the Lippmann-Schwinger equation u = u^i - k^2 G(V u)."""
import math
from dataclasses import dataclass, field
from functools import cached_property
from numbers import Number

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from app.models.geometry import Ball, Domain
from app.models.grid import GridField, cell_grid, volume_fractions
from app.models.kernels import VolumePotential, far_field_constant
from app.models.mie_series import ModalIncidence, RadialScatterer
from app.models.scattering_source import FarField, sphere_directions
from app.utils.errors import ConfigError, InvalidScene, NotContractive
from app.utils.logger import logger
from app.utils.seed import make_rng

INCIDENT_KINDS = ("plane_wave", "herglotz", "cgo")


class IncidentField:
    def __init__(self, kind, k, n, direction=None, modes=None, axis=None, rho=None):
        if kind not in INCIDENT_KINDS:
            raise ConfigError(f"unknown incident kind '{kind}'")
        self.kind, self.k, self.n = kind, float(k), n
        if kind == "plane_wave":
            direction = np.asarray(direction if direction is not None else np.eye(n)[0], dtype=float)
            self.direction = direction / np.linalg.norm(direction)
        elif kind == "herglotz":
            if not modes:
                raise ConfigError("a Herglotz wave needs at least one density mode")
            self.modes = {int(m): complex(g) for m, g in modes.items()}
            self.axis = axis
        else:
            rho = np.asarray(rho, dtype=complex)
            if rho.size != n or abs(np.sum(rho * rho) + self.k ** 2) > 1e-10 * (1.0 + self.k ** 2):
                raise ConfigError("a CGO incident wave needs rho . rho = -k^2")
            self.rho = rho

    @classmethod
    def plane_wave(cls, k, direction):
        direction = np.asarray(direction, dtype=float)
        return cls("plane_wave", k, direction.size, direction=direction)

    @classmethod
    def herglotz(cls, k, n, modes, axis=None):
        return cls("herglotz", k, n, modes=modes, axis=axis)

    @classmethod
    def cgo(cls, k, rho):
        return cls("cgo", k, len(rho), rho=rho)

    def modal(self, order):
        if self.kind == "plane_wave":
            return ModalIncidence.plane_wave(self.direction, order)
        if self.kind == "herglotz":
            scale = 2.0 * math.pi if self.n == 2 else 4.0 * math.pi
            return ModalIncidence(self.n, {m: scale * 1j ** m * g for m, g in self.modes.items()}, axis=self.axis)
        raise ConfigError("CGO incidence has no modal expansion about a ball")

    def __call__(self, x):
        x = np.atleast_2d(x)
        if self.kind == "plane_wave":
            return np.exp(1j * self.k * (x @ self.direction))
        if self.kind == "cgo":
            return np.exp(x @ self.rho)
        return self.modal(0)(self.k, x)


class MediumScene:
    def __init__(self, domain, contrast, k, incident, spacing=None, solve_radius=None):
        if k <= 0:
            raise ConfigError("wavenumber must be positive")
        self.domain = domain
        self.contrast = contrast
        self.k = float(k)
        self.n = domain.n
        self.incident = incident
        wavelength = 2.0 * math.pi / self.k
        self.spacing = float(spacing) if spacing else min(domain.diameter / 64.0, wavelength / 16.0)
        lo, hi = domain.bounding_box
        self.solve_radius = float(solve_radius) if solve_radius else 0.5 * float(np.linalg.norm(hi - lo))
        rim = domain.boundary_mesh[0]
        if np.any(np.imag(self.contrast_at(rim)) < -1e-14):
            raise InvalidScene("contrast must satisfy Im V >= 0")

    def contrast_at(self, x):
        x = np.atleast_2d(x)
        if isinstance(self.contrast, Number):
            return np.full(x.shape[0], complex(self.contrast))
        return np.asarray(self.contrast(x), dtype=complex)

    @cached_property
    def grid(self):
        first, shape = cell_grid(self.domain, self.spacing)
        fractions = volume_fractions(self.domain, first, shape, self.spacing)
        axes = [c + self.spacing * np.arange(m) for c, m in zip(first, shape)]
        centres = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.n)
        V = np.zeros(centres.shape[0], dtype=complex)
        touched = fractions.ravel() > 0
        V[touched] = self.contrast_at(centres[touched]) * fractions.ravel()[touched]
        return first, shape, centres, V.reshape(shape)

    @property
    def contrast_sup(self):
        return float(np.max(np.abs(self.grid[3])))

    @cached_property
    def potential(self):
        _, shape, _, _ = self.grid
        return VolumePotential(shape, self.spacing, self.k)


@dataclass(eq=False)
class LsSolution:
    u: GridField
    log: list = field(default_factory=list)
    converged: bool = True
    method: str = "neumann"

    @property
    def iterations(self):
        return len(self.log)


def solve_ls(scene, tol=1e-8, max_iter=200):
    """Neumann iteration for u = u^i - k^2 G(V u), with a GMRES fallback when it stalls."""
    first, shape, centres, V = scene.grid
    k2 = scene.k ** 2
    G = scene.potential
    ui = scene.incident(centres).reshape(shape)
    ui_norm = float(np.linalg.norm(ui)) or 1.0

    def apply(u):
        return u + k2 * G(V * u)

    log = []
    u = np.zeros(shape, dtype=complex)
    previous = None
    ratio = 0.0
    for iteration in range(1, max_iter + 1):
        update = ui - k2 * G(V * u)
        step = float(np.linalg.norm(update - u))
        u = update
        residual = float(np.linalg.norm(apply(u) - ui)) / ui_norm
        ratio = step / previous if previous else 0.0
        previous = step
        log.append({"iteration": iteration, "residual": residual, "ratio": ratio})
        logger.debug(f"LS iteration {iteration}: residual {residual:.3e}, ratio {ratio:.3f}")
        if residual <= tol:
            logger.info(f"LS converged by Neumann iteration in {iteration} steps on {shape}")
            return LsSolution(GridField(first, scene.spacing, u), log, True, "neumann")
        if iteration >= 5 and (ratio >= 0.99 or not np.isfinite(residual)):
            break

    logger.warning("Neumann iteration stalled; switching to GMRES")
    size = int(np.prod(shape))
    operator = LinearOperator((size, size), matvec=lambda v: apply(v.reshape(shape)).ravel(), dtype=complex)
    # a diverged iterate is a worse start than the incident field
    start = u.ravel() if np.all(np.isfinite(u)) and ratio < 1.0 else ui.ravel()
    solution, info = gmres(operator, ui.ravel(), x0=start, rtol=tol, restart=50, maxiter=max_iter)
    u = solution.reshape(shape)
    residual = float(np.linalg.norm(apply(u) - ui)) / ui_norm
    log.append({"iteration": len(log) + 1, "residual": residual, "ratio": float("nan")})
    if info != 0 or residual > tol:
        raise NotContractive(f"Lippmann-Schwinger residual {residual:.3e} stayed above {tol:g}")
    logger.info(f"LS converged by GMRES on {shape}")
    return LsSolution(GridField(first, scene.spacing, u), log, True, "gmres")


def solve_series(scene, order=None):
    """Exact solution for a single ball of constant contrast."""
    components = scene.domain.components
    if len(components) != 1 or not isinstance(components[0], Ball) or not isinstance(scene.contrast, Number):
        raise ConfigError("the series solver needs a single ball of constant contrast")
    ball = components[0]
    if complex(scene.contrast).imag != 0:
        raise ConfigError("the series solver handles real contrasts")
    scatterer = RadialScatterer(scene.k, ball.radius, float(complex(scene.contrast).real), scene.n,
                                center=ball.center, order=order)
    modal = scene.incident.modal(scatterer.order)
    if scene.incident.kind == "plane_wave":
        phase = np.exp(1j * scene.k * float(scene.incident.direction @ ball.center))
        modal = ModalIncidence(modal.n, {m: phase * a for m, a in modal.amplitudes.items()}, axis=modal.axis)
    return scatterer, modal


def _ball_grid(R_m, n, spacing):
    domain = Domain([Ball(np.zeros(n), R_m)])
    first, shape = cell_grid(domain, spacing)
    return domain, first, shape, volume_fractions(domain, first, shape, spacing)


def estimate_c0(k, R_m, n, n_iterations=10, spacing=None, seed=None):
    """Lower estimate of the L2(B_{R_m}) norm of (Delta + k^2)^{-1} by power iteration on G^H G."""
    if n_iterations < 10:
        raise ConfigError("estimate_c0 needs at least 10 power iterations")
    spacing = spacing or R_m / 32.0
    _, _, shape, chi = _ball_grid(R_m, n, spacing)
    G = VolumePotential(shape, spacing, k)
    rng = make_rng(f"c0-{n}", seed)
    v = (rng.normal(size=shape) + 1j * rng.normal(size=shape)) * chi
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(n_iterations):
        w = chi * G(v)
        estimate = float(np.linalg.norm(w))
        v = chi * G.adjoint(w)
        v /= np.linalg.norm(v)
    estimate = max(estimate, float(np.linalg.norm(chi * G(v))))
    logger.info(f"C0 estimate at k={k:g}, R={R_m:g}: {estimate:.6g}")
    return estimate


def c0_young_bound(k, R_m, n, spacing=None):
    """Young's inequality: ||G||_{L2(B_R) -> L2(B_R)} <= int_{|z| < 2R} |G(z)| dz."""
    spacing = spacing or R_m / 32.0
    _, _, shape, _ = _ball_grid(R_m, n, spacing)
    return VolumePotential(shape, spacing, k).kernel_l1(2.0 * R_m)


def _far_field_of_density(scene, density, directions, weights, angles):
    _, _, centres, _ = scene.grid
    flat = density.ravel()
    keep = flat != 0
    y, masses = centres[keep], flat[keep] * scene.spacing ** scene.n
    values = np.zeros(directions.shape[0], dtype=complex)
    for start in range(0, y.shape[0], 4096):
        values += np.exp(-1j * scene.k * (directions @ y[start:start + 4096].T)) @ masses[start:start + 4096]
    values *= -scene.k ** 2 * far_field_constant(scene.k, scene.n)
    return FarField(directions, values, scene.k, weights, angles)


def scattered_far_field(scene, solution, n_dirs=64, directions=None):
    """u^s_inf(xhat) = -k^2 C_{n,k} int e^{-ik xhat . y} V(y) u(y) dy."""
    _, _, _, V = scene.grid
    dirs, weights, angles = _directions(scene.n, n_dirs, directions)
    return _far_field_of_density(scene, V * solution.u.values, dirs, weights, angles)


def born_far_field(scene, n_dirs=64, directions=None):
    _, shape, centres, V = scene.grid
    dirs, weights, angles = _directions(scene.n, n_dirs, directions)
    return _far_field_of_density(scene, V * scene.incident(centres).reshape(shape), dirs, weights, angles)


def series_far_field(scene, n_dirs=64, directions=None):
    scatterer, modal = solve_series(scene)
    dirs, weights, angles = _directions(scene.n, n_dirs, directions)
    return FarField(dirs, scatterer.far_field(dirs, modal), scene.k, weights, angles)


def _directions(n, n_dirs, directions):
    if directions is None:
        return sphere_directions(n, n_dirs)
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    return directions, np.ones(directions.shape[0]), directions


def scatter_visibility_ratio(scene, alpha):
    points = scene.domain.boundary_mesh[0]
    sup = float(np.max(np.abs(scene.contrast_at(points) * scene.incident(points))))
    return sup / scene.domain.diameter ** alpha


def optical_theorem_defect(far_field, forward_value):
    """Relative mismatch between ||u_inf||^2 and the forward-amplitude side of the optical theorem."""
    k = far_field.k
    energy = far_field.l2_norm() ** 2
    if far_field.n == 2:
        forward = -2.0 * math.sqrt(2.0 * math.pi / k) * (np.exp(0.25j * math.pi) * forward_value).real
    else:
        forward = 4.0 * math.pi / k * complex(forward_value).imag
    return abs(energy - forward) / max(energy, abs(forward), 1e-300)
