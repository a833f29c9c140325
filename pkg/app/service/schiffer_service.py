# app/service/schiffer_service.py
"""Single-measurement determination of small scatterers.

Separation: two disjoint small scatterers never share a far field. Counting: a well-separated
collection is told apart from every candidate with a different number of components.
"""
import math

import numpy as np

from app.models.geometry import Ball, Domain
from app.models.scattering_medium import MediumScene
from app.models.scattering_source import FarField, SourceScene, far_field, sphere_directions
from app.schemas.experiment_schema import SchifferCountingSchema, SchifferSeparationSchema
from app.service.calibration_service import scaled_max
from app.service.suite_base import (SuiteService, contraction_factor, medium_far_field, relative_difference,
                                    sweep)
from app.utils.errors import ConfigError
from app.utils.logger import logger
from app.utils.seed import make_rng


def domains_disjoint(a, b):
    """No boundary sample of either domain lies in the other, and neither contains the other."""
    mesh_a, mesh_b = a.boundary_mesh[0], b.boundary_mesh[0]
    if np.any(b.contains(mesh_a)) or np.any(a.contains(mesh_b)):
        return False
    return True


class SchifferSeparationService(SuiteService):
    name = "schiffer-separation"
    schema = SchifferSeparationSchema
    header = ("pair", "difference", "disjoint", "diameter", "wavenumber", "contraction", "hypothesis",
              "counterexample")
    chart_column = "difference"

    def _scene(self, data, part):
        n, k = data["dimension"], data["wavenumber"]
        domain = self.scenes.build_domain(part["domain"], n)
        contrast = self.scenes.build_profile(part["contrast"], n)
        incident = self.scenes.build_incident(data["incident"], k, n)
        return MediumScene(domain, contrast, k, incident, spacing=data["spacing"])

    def _row(self, data, pair):
        a, b = self._scene(data, pair["a"]), self._scene(data, pair["b"])
        far_a, _ = medium_far_field(a, data["tol"], data["max_iter"], data["n_dirs"])
        far_b, _ = medium_far_field(b, data["tol"], data["max_iter"], data["n_dirs"])
        difference = relative_difference(far_a, far_b)
        logger.info(f"{self.name} {pair['name']}: relative far-field difference {difference:.4e}")
        return {
            "pair": pair["name"],
            "difference": float(difference),
            "disjoint": bool(domains_disjoint(a.domain, b.domain)),
            "diameter": float(max(a.domain.diameter, b.domain.diameter)),
            "wavenumber": float(data["wavenumber"]),
            "contraction": float(max(contraction_factor(a), contraction_factor(b))),
        }

    def execute(self, data):
        rows = sweep(lambda pair: self._row(data, pair), data["pairs"])

        def calibrate():
            passing = [row for row in rows if row["disjoint"] and row["difference"] > data["floor"]]
            return {"C1": scaled_max((row["diameter"] for row in passing), 0.0),
                    "C2": max((row["wavenumber"] for row in passing), default=0.0),
                    "floor": data["floor"]}

        constants = self.calibration.constants(self.name, calibrate)
        for row in rows:
            row["hypothesis"] = bool(row["disjoint"] and row["diameter"] <= constants["C1"]
                                     and row["wavenumber"] <= constants["C2"])
            row["counterexample"] = bool(row["hypothesis"] and row["difference"] <= constants["floor"])
        return rows, constants, {}


def _component_extent(shape):
    lo, hi = shape.bounding_box()
    return 0.5 * (lo + hi), 0.5 * float(np.max(hi - lo))


class SchifferCountingService(SuiteService):
    name = "schiffer-counting"
    schema = SchifferCountingSchema
    header = ("candidate", "count", "wrong_count", "mismatch", "above_floor", "counterexample")
    chart_column = "mismatch"

    def _far_field(self, data, shapes):
        n, k = data["dimension"], data["wavenumber"]
        if not shapes:
            dirs, weights, angles = sphere_directions(n, data["n_dirs"])
            return FarField(dirs, np.zeros(dirs.shape[0], dtype=complex), k, weights, angles)
        domain = Domain(shapes)
        profile = self.scenes.build_profile(data["profile"], n)
        if data["problem"] == "source":
            scene = SourceScene(domain, self.scenes.as_function(profile), k, spacing=data["spacing"])
            return far_field(scene, n_dirs=data["n_dirs"])
        incident = self.scenes.build_incident(data["incident"], k, n)
        scene = MediumScene(domain, profile, k, incident, spacing=data["spacing"])
        return medium_far_field(scene, data["tol"], data["max_iter"], data["n_dirs"])[0]

    def _generated(self, data, truth):
        """Wrong-count layouts drawn around the truth, plus correct-count layouts with shifted centres."""
        n = data["dimension"]
        spec = data["generate"]
        rng = make_rng("schiffer-counting", spec["seed"])
        extents = [_component_extent(shape) for shape in truth]
        radius = float(np.mean([r for _, r in extents]))
        lo, hi = Domain(truth).bounding_box
        lo, hi = lo - radius, hi + radius
        counts = [m for m in range(1, len(truth) + 2) if m != len(truth)]
        candidates = []
        for i in range(spec["count"]):
            m = counts[i % len(counts)]
            centres = []
            for _ in range(1000 * m):
                c = lo + (hi - lo) * rng.random(n)
                if all(np.linalg.norm(c - other) > 2.5 * radius for other in centres):
                    centres.append(c)
                if len(centres) == m:
                    break
            if len(centres) < m:
                raise ConfigError(f"cannot place {m} separated candidate components around the truth")
            candidates.append((f"random-{i}", [Ball(c, radius) for c in centres]))
        for i in range(spec["perturbed"]):
            shapes = []
            for centre, r in extents:
                direction = rng.normal(size=n)
                direction /= np.linalg.norm(direction)
                shapes.append(Ball(centre + 0.25 * (2 * r) * rng.random() * direction, r))
            candidates.append((f"perturbed-{i}", shapes))
        return candidates

    def execute(self, data):
        n = data["dimension"]
        truth = [shape for spec in data["truth"] for shape in self.scenes.build_shapes(spec, n)]
        c1 = max(2.0 * r for _, r in (_component_extent(shape) for shape in truth))
        gap = Domain(truth, well_separated=True).validate_separation(c1) if len(truth) > 1 else math.inf

        candidates = [(c["name"], [s for spec in c["components"] for s in self.scenes.build_shapes(spec, n)])
                      for c in data["candidates"]]
        candidates += self._generated(data, truth)
        if data["include_empty"]:
            candidates.append(("empty", []))

        truth_far = self._far_field(data, truth)
        truth_norm = truth_far.l2_norm()
        fars = sweep(lambda candidate: self._far_field(data, candidate[1]), candidates)

        def calibrate():
            return {"C1": c1, "floor": data["floor"]}

        constants = self.calibration.constants(self.name, calibrate)
        rows = []
        for (name, shapes), far in zip(candidates, fars):
            mismatch = (far + truth_far.scaled(-1.0)).l2_norm() / truth_norm if truth_norm else 0.0
            wrong = len(shapes) != len(truth)
            rows.append({
                "candidate": name,
                "count": len(shapes),
                "wrong_count": bool(wrong),
                "mismatch": float(mismatch),
                "above_floor": bool(mismatch > constants["floor"]),
                "counterexample": bool(wrong and mismatch <= constants["floor"]),
            })
            logger.info(f"{self.name} {name}: {len(shapes)} components, mismatch {mismatch:.4e}")
        best = min(rows, key=lambda row: row["mismatch"]) if rows else None
        return rows, constants, {
            "truth_count": len(truth),
            "truth_gap": gap,
            "truth_farfield_norm": truth_norm,
            "best_candidate": best["candidate"] if best else None,
            "best_has_true_count": bool(best and not best["wrong_count"]),
        }
