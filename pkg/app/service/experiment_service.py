# app/service/experiment_service.py

from app.service.calibration_service import CalibrationService
from app.service.curvature_service import CurvatureSourceService
from app.service.medium_visibility_service import MediumVisibilityService
from app.service.schiffer_service import SchifferCountingService, SchifferSeparationService
from app.service.smallness_service import SmallnessSourceService
from app.service.uniqueness_service import CurvatureUniquenessService
from app.utils.errors import ConfigError

SUITES = {
    service.name: service
    for service in (SmallnessSourceService, CurvatureSourceService, MediumVisibilityService,
                    SchifferSeparationService, SchifferCountingService, CurvatureUniquenessService)
}


class ExperimentService:
    def __init__(self, calibration_path=None):
        self.calibration = CalibrationService(calibration_path)

    def suite(self, name):
        if name not in SUITES:
            raise ConfigError(f"unknown suite '{name}'; choose one of {sorted(SUITES)}")
        return SUITES[name](self.calibration)

    def run(self, name, config, out_dir, pdf=False):
        return self.suite(name).run(config, out_dir, pdf=pdf)


def run_smallness_source(config, out_dir, calibration_path=None):
    return ExperimentService(calibration_path).run("smallness-source", config, out_dir)


def run_curvature_source(config, out_dir, calibration_path=None):
    return ExperimentService(calibration_path).run("curvature-source", config, out_dir)


def run_medium_visibility(config, out_dir, calibration_path=None):
    return ExperimentService(calibration_path).run("medium-visibility", config, out_dir)


def run_schiffer_separation(config, out_dir, calibration_path=None):
    return ExperimentService(calibration_path).run("schiffer-separation", config, out_dir)


def run_schiffer_counting(config, out_dir, calibration_path=None):
    return ExperimentService(calibration_path).run("schiffer-counting", config, out_dir)


def run_curvature_uniqueness_demo(config, out_dir, calibration_path=None):
    return ExperimentService(calibration_path).run("curvature-uniqueness", config, out_dir)
