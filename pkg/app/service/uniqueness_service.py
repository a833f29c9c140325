# app/service/uniqueness_service.py
"""Two media that differ by a high-curvature point cannot share a far field.

A curvature point p of the first domain qualifies when it lies outside the second domain at
distance at least sqrt(1 + M)/K, is reachable from infinity through the complement of the
union, and carries a non-zero contrast.
"""
import math

from scipy.spatial import cKDTree

from app.models.geometry import CappedBody, Domain, MollifiedPolygon, connected_to_infinity
from app.models.scattering_medium import MediumScene
from app.schemas.experiment_schema import CurvatureUniquenessSchema
from app.service.suite_base import SuiteService, contraction_factor, medium_far_field, relative_difference, sweep
from app.utils.errors import ResolutionTooCoarse
from app.utils.logger import logger

POLYGON_M = 2.0


def curvature_points(domain):
    """(point, K, M) for every cap apex and every rounded polygon corner of the domain."""
    points = []
    for component in domain.components:
        if isinstance(component, CappedBody):
            points.append((component.apex, component.cap.K, component.cap.M))
        elif isinstance(component, MollifiedPolygon):
            apexes, _ = component.corner_apexes()
            points.extend((p, component.curvature, POLYGON_M) for p in apexes)
    return points


def distance_to(domain, point):
    if domain.contains(point[None, :])[0]:
        return 0.0
    distance, _ = cKDTree(domain.boundary_mesh[0]).query(point)
    return float(distance)


class CurvatureUniquenessService(SuiteService):
    name = "curvature-uniqueness"
    schema = CurvatureUniquenessSchema
    header = ("pair", "difference", "curvature_points", "qualifying_points", "max_K", "contraction",
              "hypothesis", "counterexample")
    chart_column = "difference"

    def _scene(self, data, part):
        n, k = data["dimension"], data["wavenumber"]
        domain = self.scenes.build_domain(part["domain"], n)
        contrast = self.scenes.build_profile(part["contrast"], n)
        incident = self.scenes.build_incident(data["incident"], k, n)
        return MediumScene(domain, contrast, k, incident, spacing=data["spacing"])

    def _qualifying(self, data, a, b):
        union = Domain(a.domain.components + b.domain.components)
        qualifying = []
        for point, K, M in curvature_points(a.domain):
            if distance_to(b.domain, point) < math.sqrt(1.0 + M) / K:
                continue
            if abs(complex(a.contrast_at(point[None, :])[0])) == 0:
                continue
            resolution = data["grid_resolution"] or min(union.diameter / 256.0, 0.5 / K)
            try:
                reachable = connected_to_infinity(point, union, resolution)
            except ResolutionTooCoarse:
                logger.warning(f"{self.name}: point {point.tolist()} not resolved at {resolution:g}")
                reachable = False
            if reachable:
                qualifying.append(K)
        return qualifying

    def _row(self, data, pair):
        a, b = self._scene(data, pair["a"]), self._scene(data, pair["b"])
        far_a, _ = medium_far_field(a, data["tol"], data["max_iter"], data["n_dirs"])
        far_b, _ = medium_far_field(b, data["tol"], data["max_iter"], data["n_dirs"])
        difference = relative_difference(far_a, far_b)
        qualifying = self._qualifying(data, a, b)
        logger.info(f"{self.name} {pair['name']}: difference {difference:.4e}, "
                    f"{len(qualifying)} qualifying curvature points")
        return {
            "pair": pair["name"],
            "difference": float(difference),
            "curvature_points": len(curvature_points(a.domain)),
            "qualifying_points": len(qualifying),
            "max_K": float(max(qualifying)) if qualifying else 0.0,
            "contraction": float(max(contraction_factor(a), contraction_factor(b))),
        }

    def execute(self, data):
        rows = sweep(lambda pair: self._row(data, pair), data["pairs"])

        def calibrate():
            return {"floor": data["floor"]}

        constants = self.calibration.constants(self.name, calibrate)
        for row in rows:
            row["hypothesis"] = bool(row["qualifying_points"] > 0)
            row["counterexample"] = bool(row["hypothesis"] and row["difference"] <= constants["floor"])
        return rows, constants, {}
