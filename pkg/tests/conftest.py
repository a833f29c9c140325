import json

import pytest
from click.testing import CliRunner

from app import create_app


@pytest.fixture
def app():
    return create_app(testing=True)


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)


@pytest.fixture
def write_config(tmp_path):
    """Writes a dict as JSON under tmp_path and returns the path as a string."""
    def write(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return str(path)
    return write


@pytest.fixture
def disk_source_scene():
    return {
        "dimension": 2,
        "wavenumber": 1.0,
        "domain": {"kind": "ball", "params": {"center": [0.0, 0.0], "radius": 1.0}},
        "intensity": {"kind": "constant", "value": 1.0},
        "spacing": 0.05,
        "fields": {"spacing": 0.2, "padding": 0.2},
    }


@pytest.fixture
def disk_medium_scene():
    return {
        "dimension": 2,
        "wavenumber": 1.0,
        "domain": {"kind": "ball", "params": {"radius": 0.5}},
        "contrast": {"kind": "constant", "value": 0.1},
        "incident": {"kind": "plane_wave", "direction": [1.0, 0.0]},
        "spacing": 0.02,
    }
