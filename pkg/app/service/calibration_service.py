# app/service/calibration_service.py
"""Calibrated suite constants: computed from a suite's own calibration rows, or frozen from a file."""
import json
import os

from app.utils.errors import ConfigError
from app.utils.export import write_json
from app.utils.logger import logger

CALIBRATION_FILE = "calibration.json"
MARGIN = 1.05


class CalibrationService:
    def __init__(self, frozen_path=None):
        self.frozen_path = frozen_path
        self._frozen = self._read(frozen_path) if frozen_path else None

    @staticmethod
    def _read(path):
        with open(path, encoding="utf-8") as handle:
            payload = json.load(handle)
        if not isinstance(payload, dict):
            raise ConfigError(f"calibration file {path} must hold an object keyed by suite")
        return payload

    @property
    def frozen(self):
        return self._frozen is not None

    def constants(self, suite, calibrate):
        """Frozen constants for the suite if a file was given, otherwise calibrate()."""
        if self._frozen is None:
            values = calibrate()
            logger.info(f"Calibrated {suite}: {values}")
            return values
        if suite not in self._frozen:
            raise ConfigError(f"calibration file {self.frozen_path} has no entry for '{suite}'")
        logger.info(f"Using frozen calibration for {suite} from {self.frozen_path}")
        return dict(self._frozen[suite])

    def store(self, out_dir, suite, values):
        """Merge this suite's constants into out_dir/calibration.json."""
        path = os.path.join(out_dir, CALIBRATION_FILE)
        payload = self._read(path) if os.path.exists(path) else {}
        payload[suite] = values
        return write_json(path, payload)


def scaled_max(values, floor=0.0):
    """MARGIN times the largest value, or floor when there is nothing to calibrate from."""
    values = [float(v) for v in values]
    return MARGIN * max(values) if values else float(floor)
