# app/service/smallness_service.py
"""Small sources radiate: a source whose boundary values are large against its C^alpha norm
times diam^alpha has a non-zero far field.

The calibration family is the radiationless balls (radius at a zero of J_{n/2}(k r)),
which fix the constant C; every sweep row whose ratio exceeds C must be visible.
"""
import numpy as np

from app.models.geometry import Ball, Domain
from app.models.scattering_source import SourceScene, far_field, radiationless_radius, visibility_ratio
from app.schemas.experiment_schema import SmallnessSourceSchema
from app.service.calibration_service import scaled_max
from app.service.suite_base import SuiteService, sweep
from app.utils.logger import logger


class SmallnessSourceService(SuiteService):
    name = "smallness-source"
    schema = SmallnessSourceSchema
    header = ("role", "radius", "visibility_ratio", "farfield_sup", "visible", "hypothesis", "counterexample")
    chart_column = "farfield_sup"

    def _row(self, data, role, radius, phi):
        n, k = data["dimension"], data["wavenumber"]
        scene = SourceScene(Domain([Ball(np.zeros(n), radius)]), phi, k, spacing=data["spacing"])
        sup = far_field(scene, n_dirs=data["n_dirs"]).sup()
        ratio = visibility_ratio(scene, data["alpha"])
        logger.info(f"{self.name} {role} r={radius:.6g}: ratio {ratio:.4e}, far-field sup {sup:.4e}")
        return {"role": role, "radius": float(radius), "visibility_ratio": float(ratio), "farfield_sup": float(sup),
                "visible": bool(sup >= data["floor"])}

    def execute(self, data):
        n, k = data["dimension"], data["wavenumber"]
        phi = self.scenes.as_function(self.scenes.build_profile(data["intensity"], n))
        zero = self.scenes.as_function(0.0)
        jobs = [("radiationless", radiationless_radius(k, n, b), self.scenes.as_function(1.0))
                for b in data["branches"]]
        jobs += [("sweep", r, phi) for r in data["radii"]]
        if data["include_zero"]:
            jobs.append(("zero", data["radii"][0], zero))
        rows = sweep(lambda job: self._row(data, *job), jobs)

        def calibrate():
            return {"C": scaled_max(row["visibility_ratio"] for row in rows
                                    if row["role"] == "radiationless" and not row["visible"]),
                    "floor": data["floor"]}

        constants = self.calibration.constants(self.name, calibrate)
        for row in rows:
            row["hypothesis"] = bool(row["visibility_ratio"] > constants["C"])
            row["counterexample"] = bool(row["hypothesis"] and row["farfield_sup"] < constants["floor"])
        radiationless = [row for row in rows if row["role"] == "radiationless"]
        return rows, constants, {
            "radiationless_invisible": all(not row["visible"] for row in radiationless),
            "radiationless_radii": [row["radius"] for row in radiationless],
        }
