# app/service/transmission_service.py
import math

from app.models.scattering_medium import IncidentField, MediumScene, scattered_far_field, solve_ls
from app.models.transmission import RadialITP, boundary_vanishing_ratio, find_eigenvalues
from app.schemas.itp_schema import ItpSchema
from app.utils.errors import ConfigError
from app.utils.export import write_csv
from app.utils.logger import logger

HEADER = ["mode", "k", "a", "b", "boundary_mismatch", "ode_residual_w", "ode_residual_u", "boundary_ratio",
          "nonscattering"]


def nonscattering_defect(pair, n_dirs=64, spacing=None):
    """Grid Lippmann-Schwinger far field of the mode-m Herglotz wave, relative to a unit scattering coefficient.

    The default grid puts 80 cells across the radius and at least 32 per interior wavelength.
    """
    itp = pair.itp
    incident = IncidentField.herglotz(pair.k_eig, itp.n, {pair.m: 1.0})
    inner_wavelength = 2.0 * math.pi / (pair.k_eig * math.sqrt(1.0 + itp.v0))
    spacing = spacing or min(itp.R / 80.0, inner_wavelength / 32.0)
    scene = MediumScene(itp.domain(), itp.v0, pair.k_eig, incident, spacing=spacing)
    far = scattered_far_field(scene, solve_ls(scene), n_dirs=n_dirs)
    if itp.n == 2:
        scale = 2.0 * math.pi * math.sqrt(2.0 / (math.pi * pair.k_eig))
    else:
        scale = 4.0 * math.pi / pair.k_eig
    defect = far.sup() / scale
    logger.debug(f"Non-scattering defect at k={pair.k_eig:.6g}, mode {pair.m}: {defect:.3e}")
    return defect


class TransmissionService:
    def load(self, data, k_max=None, modes=None):
        data = ItpSchema().load(data)
        k_max = k_max or data["k_max"]
        if not k_max:
            raise ConfigError("give k_max in the file or with --kmax")
        modes = modes if modes is not None else data["modes"]
        itp = RadialITP(R=data["radius"], v0=data["contrast"], n=data["dimension"], m=modes[0])
        return itp, k_max, modes, data

    def eigen_table(self, data, k_max=None, modes=None, out=None):
        itp, k_max, modes, data = self.load(data, k_max, modes)
        pairs = find_eigenvalues(itp, k_max, modes=modes, steps=data["steps"])
        rows = []
        for pair in pairs:
            res_w, res_u = pair.ode_residuals()
            rows.append({
                "mode": pair.m,
                "k": pair.k_eig,
                "a": pair.a,
                "b": pair.b,
                "boundary_mismatch": pair.boundary_mismatch(),
                "ode_residual_w": res_w,
                "ode_residual_u": res_u,
                "boundary_ratio": boundary_vanishing_ratio(pair, itp, data["alpha"]),
                "nonscattering": nonscattering_defect(pair),
            })
        logger.info(f"Transmission table: {len(rows)} eigenvalues below {k_max:g}")
        if out:
            write_csv(out, HEADER, ([row[column] for column in HEADER] for row in rows))
        return {"items": rows, "total": len(rows)}
