# app/service/suite_base.py
"""Shared plumbing for experiment suites: row sweeps, output files and the pass/fail verdict."""
import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from app.config import Config
from app.models.kernels import far_field_constant
from app.models.scattering_medium import estimate_c0, scattered_far_field, solve_ls
from app.service.calibration_service import CalibrationService
from app.service.scene_service import SceneService
from app.utils.errors import SuiteAssertionError
from app.utils.export import write_csv, write_json
from app.utils.logger import logger
from app.utils.report_pdf import write_suite_pdf

ZERO_FAR_FIELD = 1e-8


def sweep(fn, items):
    """fn over items on the worker pool; results keep the input order."""
    with ThreadPoolExecutor(max_workers=Config.THREADS) as pool:
        return list(pool.map(fn, items))


def relative_difference(a, b):
    scale = max(a.l2_norm(), b.l2_norm())
    if scale == 0:
        return 0.0
    return (a + b.scaled(-1.0)).l2_norm() / scale


def enclosing_radius(domain):
    lo, hi = domain.bounding_box
    return float(max(np.linalg.norm(lo), np.linalg.norm(hi)))


def contraction_factor(scene):
    """k^2 C0 ||V||, with C0 the power-iteration estimate on the ball enclosing the scene."""
    if scene.contrast_sup == 0:
        return 0.0
    c0 = estimate_c0(scene.k, enclosing_radius(scene.domain), scene.n)
    return scene.k ** 2 * c0 * scene.contrast_sup


def medium_far_field(scene, tol, max_iter, n_dirs):
    solution = solve_ls(scene, tol=tol, max_iter=max_iter)
    return scattered_far_field(scene, solution, n_dirs=n_dirs), solution


def born_scale(scene):
    """k^2 |C_{n,k}| int |V u^i|: the size a far field of this scene is measured against."""
    _, shape, centres, V = scene.grid
    ui = scene.incident(centres).reshape(shape)
    mass = float(np.sum(np.abs(V * ui))) * scene.spacing ** scene.n
    return scene.k ** 2 * abs(far_field_constant(scene.k, scene.n)) * mass


def iteration_rate(solution):
    ratios = [entry["ratio"] for entry in solution.log[1:] if math.isfinite(entry["ratio"])]
    return float(np.median(ratios)) if ratios else 0.0


class SuiteService:
    name = None
    schema = None
    header = ()
    chart_column = None

    def __init__(self, calibration=None):
        self.calibration = calibration or CalibrationService()
        self.scenes = SceneService()

    def execute(self, data):
        """Returns (rows, constants, extra summary fields)."""
        raise NotImplementedError

    @staticmethod
    def counterexamples(rows):
        return [row for row in rows if row.get("counterexample")]

    def run(self, config, out_dir, pdf=False):
        data = self.schema().load(config)
        logger.info(f"Running suite {self.name}")
        rows, constants, extra = self.execute(data)
        failures = self.counterexamples(rows)
        os.makedirs(out_dir, exist_ok=True)
        table = [[row[column] for column in self.header] for row in rows]
        write_csv(os.path.join(out_dir, f"{self.name}.csv"), list(self.header), table)
        summary = {
            "suite": self.name,
            "passed": not failures,
            "calibration": constants,
            "frozen_calibration": self.calibration.frozen,
            "counterexamples": len(failures),
            "total": len(rows),
            **extra,
        }
        write_json(os.path.join(out_dir, f"{self.name}.json"), summary)
        self.calibration.store(out_dir, self.name, constants)
        if pdf:
            write_suite_pdf(os.path.join(out_dir, f"{self.name}.pdf"), f"InvisiScat suite: {self.name}",
                            {**summary, **{f"C.{k}": v for k, v in constants.items()}}, list(self.header), table,
                            chart_column=self.chart_column)
        if failures:
            raise SuiteAssertionError(f"{self.name}: {len(failures)} of {len(rows)} rows contradict the suite's "
                                      f"visibility claim", failures)
        logger.info(f"Suite {self.name} passed on {len(rows)} rows")
        return {"items": rows, "total": len(rows), "summary": summary}
