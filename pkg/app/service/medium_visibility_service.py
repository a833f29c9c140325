# app/service/medium_visibility_service.py
"""Media that must scatter: small disks (boundary values of V u^i against diam^alpha) and capped
media (|V(p) u^i(p)| against the curvature estimate).

The comparator threshold is calibrated on the V = 0 control rows, so any other row with a
positive comparator and a numerically vanishing far field is a counterexample.
"""
import numpy as np

from app.models.cgo import curvature_estimate_rhs
from app.models.geometry import Ball, CappedBody, Domain, make_curvature_cap
from app.models.scattering_medium import MediumScene, scatter_visibility_ratio
from app.schemas.experiment_schema import MediumVisibilitySchema
from app.service.calibration_service import scaled_max
from app.service.suite_base import (SuiteService, born_scale, contraction_factor, iteration_rate,
                                    medium_far_field, sweep)
from app.utils.logger import logger


class MediumVisibilityService(SuiteService):
    name = "medium-visibility"
    schema = MediumVisibilitySchema
    header = ("role", "size", "comparator", "farfield_sup", "relative_sup", "contraction", "contractive",
              "iterations", "rate", "solver", "hypothesis", "counterexample")
    chart_column = "relative_sup"

    def _contrast(self, data):
        value = complex(data["contrast"])
        return value.real if value.imag == 0 else value

    def _row(self, data, job):
        role, size = job
        n, k, alpha = data["dimension"], data["wavenumber"], data["alpha"]
        incident = self.scenes.build_incident(data["incident"], k, n)
        contrast = 0.0 if role == "control" else self._contrast(data)
        if role == "capped":
            cap = make_curvature_cap(size, None, L=data["L"], M=data["M"], delta=data["delta"], n=n)
            body = CappedBody(cap, bulk_radius=data["bulk_radius"])
            scene = MediumScene(Domain([body]), contrast, k, incident, spacing=data["spacing"])
            apex = body.apex[None, :]
            local = abs(complex(scene.contrast_at(apex)[0] * incident(apex)[0]))
            comparator = local / curvature_estimate_rhs(size, alpha, data["delta"], data["L"], data["M"], n, k)
        else:
            scene = MediumScene(Domain([Ball(np.zeros(n), size)]), contrast, k, incident, spacing=data["spacing"])
            comparator = scatter_visibility_ratio(scene, alpha)
        far, solution = medium_far_field(scene, data["tol"], data["max_iter"], data["n_dirs"])
        scale = born_scale(scene)
        sup = far.sup()
        q = contraction_factor(scene)
        logger.info(f"{self.name} {role} {size:.6g}: comparator {comparator:.4e}, far-field sup {sup:.4e}")
        return {
            "role": role,
            "size": float(size),
            "comparator": float(comparator),
            "farfield_sup": float(sup),
            "relative_sup": float(sup / scale) if scale else 0.0,
            "contraction": float(q),
            "contractive": bool(q <= 0.5),
            "iterations": solution.iterations,
            "rate": iteration_rate(solution),
            "solver": solution.method,
        }

    def execute(self, data):
        jobs = []
        if data["include_control"]:
            jobs.append(("control", (data["radii"] or [0.5])[0]))
        jobs += [("disk", r) for r in data["radii"]]
        jobs += [("capped", K) for K in sorted(data["K_list"])]
        rows = sweep(lambda job: self._row(data, job), jobs)

        def calibrate():
            return {"C": scaled_max(row["comparator"] for row in rows if row["role"] == "control"),
                    "floor": data["floor"]}

        constants = self.calibration.constants(self.name, calibrate)
        for row in rows:
            row["hypothesis"] = bool(row["comparator"] > constants["C"])
            row["counterexample"] = bool(row["hypothesis"] and row["relative_sup"] < constants["floor"])
        return rows, constants, {"all_contractive": all(row["contractive"] for row in rows)}
