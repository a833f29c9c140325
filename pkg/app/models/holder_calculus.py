# app/models/holder_calculus.py
import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from app.models.geometry import Box
from app.models.grid import simpson_weights
from app.utils.errors import ConfigError, PrecondViolated
from app.utils.logger import logger
from app.utils.seed import make_rng

RANDOM_PAIRS = 100_000


def holder_norm(f, alpha=None, random_pairs=RANDOM_PAIRS, seed=None):
    """sup|f| + max |f(x) - f(y)| / |x - y|^alpha over sampled pairs.

    Pairs are every couple closer than four grid steps plus a seeded batch of
    long-range pairs, so the value is a lower bound of the continuum norm.
    """
    alpha = f.alpha if alpha is None else alpha
    points, values = f.masked_points, f.masked_values
    if points.shape[0] < 2:
        raise ConfigError("holder_norm needs at least two sample points")
    sup = float(np.max(np.abs(values)))
    close = cKDTree(points).query_pairs(r=4.0 * f.spacing, output_type="ndarray")
    rng = make_rng("holder-pairs", seed)
    far = rng.integers(0, points.shape[0], size=(random_pairs, 2))
    far = far[far[:, 0] != far[:, 1]]
    pairs = np.vstack([close.reshape(-1, 2), far])
    dist = np.linalg.norm(points[pairs[:, 0]] - points[pairs[:, 1]], axis=1)
    jumps = np.abs(values[pairs[:, 0]] - values[pairs[:, 1]])
    return sup + float(np.max(jumps / dist ** alpha))


def boundary_sup(f, domain):
    points = domain.boundary_mesh[0]
    return float(np.max(np.abs(f(points))))


def domain_integral(f, domain):
    """Integral of a sampled function over domain using the domain's own quadrature."""
    if f.quadrature == "simpson":
        return f.integrate()
    nodes, weights = domain.quadrature(f.spacing)
    return complex(np.sum(f(nodes) * weights))


def mean_zero_check(f, domain):
    return abs(domain_integral(f, domain))


def _pde_residual(u, phi_values, k):
    interior = ndimage.binary_erosion(u.mask, iterations=2)
    if not interior.any():
        raise ConfigError("grid too coarse to check the PDE inside the domain")
    residual = (u.laplacian() + k * k * u.values - phi_values)[interior]
    scale = float(np.max(np.abs(phi_values[interior]))) + k * k * float(np.max(np.abs(u.values[interior]))) + 1e-300
    return float(np.max(np.abs(residual))) / scale


def _gamma_mask(gamma, points):
    if gamma is None:
        return np.zeros(points.shape[0], dtype=bool)
    if isinstance(gamma, str) and gamma == "all":
        return np.ones(points.shape[0], dtype=bool)
    return np.asarray(gamma(points), dtype=bool)


def _box_flux(u, u0, gamma):
    """Face integrals of u0 d_nu u - u d_nu u0 on a node-aligned Simpson grid."""
    total = 0j
    axes = u.axes
    for axis in range(u.n):
        h = u.steps[axis]
        for side in (0, -1):
            take = lambda j: np.take(u.values, j, axis=axis)
            if side == 0:
                du = -(-3.0 * take(0) + 4.0 * take(1) - take(2)) / (2.0 * h)
                sign = -1.0
            else:
                du = (3.0 * take(-1) - 4.0 * take(-2) + take(-3)) / (2.0 * h)
                sign = 1.0
            others = [i for i in range(u.n) if i != axis]
            face_axes = [axes[i] for i in others]
            w = np.ones(())
            for i in others:
                w = np.multiply.outer(w, simpson_weights(u.values.shape[i], u.steps[i]))
            mesh = np.stack(np.meshgrid(*face_axes, indexing="ij"), axis=-1).reshape(-1, u.n - 1) \
                if others else np.zeros((1, 0))
            pts = np.empty((mesh.shape[0], u.n))
            pts[:, others] = mesh
            pts[:, axis] = axes[axis][side]
            normal = np.zeros(u.n)
            normal[axis] = sign
            keep = ~_gamma_mask(gamma, pts)
            values0 = u0(pts)
            dnu0 = u0.gradient(pts) @ normal
            integrand = (values0 * du.ravel() - take(side).ravel() * dnu0) * np.asarray(w).ravel()
            total += complex(np.sum(integrand[keep]))
    return total


def _mesh_flux(u, u0, domain, gamma):
    points, normals, weights = domain.boundary_mesh
    keep = ~_gamma_mask(gamma, points)
    points, normals, weights = points[keep], normals[keep], weights[keep]
    s = u.spacing
    g0 = u(points)
    g1 = u(points - s * normals)
    g2 = u(points - 2.0 * s * normals)
    du = -(-3.0 * g0 + 4.0 * g1 - g2) / (2.0 * s)
    dnu0 = np.sum(u0.gradient(points) * normals, axis=1)
    return complex(np.sum((u0(points) * du - g0 * dnu0) * weights))


def green_identity_residual(u, u0, phi, k, domain, gamma=None, pde_tol=0.05):
    """int_Omega (phi - k^2 u) u0 minus the boundary flux over the part of the boundary outside gamma.

    gamma is None (empty), "all", or a predicate on boundary points.
    """
    phi_values = phi.values if hasattr(phi, "values") else np.asarray(phi(u.points)).reshape(u.values.shape)
    pde = _pde_residual(u, phi_values, k)
    if pde > pde_tol:
        logger.warning(f"Green identity rejected: PDE residual {pde:.3e}")
        raise PrecondViolated(f"(Delta + k^2) u differs from phi by {pde:.3e} (relative)")
    is_box = len(domain.components) == 1 and isinstance(domain.components[0], Box) and u.quadrature == "simpson"
    if is_box:
        u0_values = np.asarray(u0(u.points)).reshape(u.values.shape)
        lhs = u.integrate((phi_values - k * k * u.values) * u0_values)
        rhs = _box_flux(u, u0, gamma)
    else:
        nodes, weights = domain.quadrature(u.spacing)
        phi_nodes = phi(nodes) if callable(phi) else np.asarray(phi)
        lhs = complex(np.sum((phi_nodes - k * k * u(nodes)) * u0(nodes) * weights))
        rhs = _mesh_flux(u, u0, domain, gamma)
    return lhs - rhs
