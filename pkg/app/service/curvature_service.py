# app/service/curvature_service.py
"""Sources with a high-curvature boundary point.

Two families per K: the constant source on a capped body must stay visible, and
the manufactured radiationless source phi = (Delta + k^2) w, w in H^2_0 of the cap
box, must have |phi(p)| / max(1, ||phi||_{C^alpha}) below a single constant times
the curvature estimate.
"""
import numpy as np

from app.models.cgo import curvature_envelope, curvature_estimate_rhs, decay_threshold
from app.models.fields import RadiationlessCapBump
from app.models.geometry import CappedBody, Domain, make_curvature_cap
from app.models.grid import sample
from app.models.holder_calculus import holder_norm
from app.models.scattering_source import SourceScene, far_field
from app.schemas.experiment_schema import CurvatureSourceSchema
from app.service.calibration_service import scaled_max
from app.service.suite_base import SuiteService, sweep
from app.utils.logger import logger


class CurvatureSourceService(SuiteService):
    name = "curvature-source"
    schema = CurvatureSourceSchema
    header = ("K", "farfield_sup", "estimate", "envelope", "above_threshold", "estimate_decreasing",
              "dual_phi_apex", "dual_phi_norm", "dual_ratio", "counterexample")
    chart_column = "estimate"

    def _row(self, data, K):
        n, k, alpha = data["dimension"], data["wavenumber"], data["alpha"]
        cap = make_curvature_cap(K, data["cubic"], L=data["L"], M=data["M"], delta=data["delta"], n=n)
        body = CappedBody(cap, bulk_radius=data["bulk_radius"])
        scene = SourceScene(Domain([body]), self.scenes.as_function(1.0), k, spacing=data["spacing"])
        sup = far_field(scene, n_dirs=data["n_dirs"]).sup()

        phi = RadiationlessCapBump(cap).source(k)
        apex = abs(complex(np.asarray(phi(body.apex[None, :])).ravel()[0]))
        box = Domain([body.cap_box()])
        norm = holder_norm(sample(phi, box, cap.b / 24.0, alpha=alpha), alpha)
        estimate = curvature_estimate_rhs(K, alpha, data["delta"], data["L"], data["M"], n, k)
        logger.info(f"{self.name} K={K:.6g}: far-field sup {sup:.4e}, estimate {estimate:.4e}")
        return {
            "K": float(K),
            "farfield_sup": float(sup),
            "estimate": float(estimate),
            "envelope": float(curvature_envelope(K, alpha, data["delta"], n)),
            "dual_phi_apex": float(apex),
            "dual_phi_norm": float(norm),
            "dual_ratio": float(apex / max(1.0, norm) / estimate),
        }

    def execute(self, data):
        K_list = sorted(data["K_list"])
        rows = sweep(lambda K: self._row(data, K), K_list)
        threshold = decay_threshold(data["alpha"], data["delta"], data["dimension"])

        def calibrate():
            return {"C": scaled_max(row["dual_ratio"] for row in rows), "floor": data["floor"]}

        constants = self.calibration.constants(self.name, calibrate)
        previous = None
        for row in rows:
            row["above_threshold"] = bool(row["K"] > threshold)
            decreasing = previous is None or row["estimate"] < previous["estimate"]
            row["estimate_decreasing"] = bool(decreasing)
            broken_decay = row["above_threshold"] and previous is not None and previous["above_threshold"] \
                and not decreasing
            row["counterexample"] = bool(row["farfield_sup"] < constants["floor"]
                                         or row["dual_ratio"] > constants["C"]
                                         or broken_decay)
            previous = row
        return rows, constants, {"decay_threshold": threshold}
