import pytest
from marshmallow import ValidationError

from app.schemas.experiment_schema import (SUITE_SCHEMAS, CurvatureSourceSchema, MediumVisibilitySchema,
                                           SchifferCountingSchema, SmallnessSourceSchema)
from app.schemas.itp_schema import ItpSchema
from app.schemas.scene_schema import MediumSceneSchema, SourceSceneSchema
from app.service.experiment_service import SUITES


def test_source_scene_loads_with_defaults(disk_source_scene):
    data = SourceSceneSchema().load(disk_source_scene)
    assert data["intensity"]["value"] == 1.0 + 0.0j
    assert data["fields_output"] == {"spacing": 0.2, "padding": 0.2}
    assert data["domain"]["well_separated"] is False


def test_source_scene_needs_intensity(disk_source_scene):
    del disk_source_scene["intensity"]
    with pytest.raises(ValidationError) as exc:
        SourceSceneSchema().load(disk_source_scene)
    assert "intensity" in exc.value.messages


def test_scene_rejects_both_profiles(disk_source_scene):
    disk_source_scene["contrast"] = {"kind": "constant", "value": 0.1}
    with pytest.raises(ValidationError):
        SourceSceneSchema().load(disk_source_scene)


def test_complex_values(disk_medium_scene):
    disk_medium_scene["contrast"] = {"kind": "constant", "value": {"re": 0.2, "im": 0.05}}
    data = MediumSceneSchema().load(disk_medium_scene)
    assert data["contrast"]["value"] == complex(0.2, 0.05)
    disk_medium_scene["contrast"]["value"] = True
    with pytest.raises(ValidationError):
        MediumSceneSchema().load(disk_medium_scene)
    disk_medium_scene["contrast"]["value"] = {"re": 1.0, "phase": 2.0}
    with pytest.raises(ValidationError):
        MediumSceneSchema().load(disk_medium_scene)


def test_medium_scene_is_two_or_three_dimensional(disk_medium_scene):
    disk_medium_scene["dimension"] = 1
    with pytest.raises(ValidationError) as exc:
        MediumSceneSchema().load(disk_medium_scene)
    assert "dimension" in exc.value.messages


@pytest.mark.parametrize("domain", [
    {"kind": "capped"},
    {"kind": "union"},
    {"kind": "torus", "params": {}},
    {"kind": "capped", "cap": {"K": 2.0}},
])
def test_domain_blocks_are_checked(disk_source_scene, domain):
    disk_source_scene["domain"] = domain
    with pytest.raises(ValidationError):
        SourceSceneSchema().load(disk_source_scene)


@pytest.mark.parametrize("profile", [
    {"kind": "constant"},
    {"kind": "expression"},
    {"kind": "grid", "lo": [0.0, 0.0], "spacing": 0.1},
    {"kind": "grid", "lo": [0.0, 0.0], "spacing": -0.1, "values": [[0.0, 1.0], [1.0, 0.0]]},
])
def test_profile_blocks_are_checked(disk_source_scene, profile):
    disk_source_scene["intensity"] = profile
    with pytest.raises(ValidationError):
        SourceSceneSchema().load(disk_source_scene)


@pytest.mark.parametrize("incident", [{"kind": "herglotz"}, {"kind": "cgo"}, {"kind": "spherical"}])
def test_incident_blocks_are_checked(disk_medium_scene, incident):
    disk_medium_scene["incident"] = incident
    with pytest.raises(ValidationError):
        MediumSceneSchema().load(disk_medium_scene)


def test_itp_schema():
    data = ItpSchema().load({"radius": 1.0, "contrast": 3.0})
    assert data["dimension"] == 2 and data["modes"] == [0] and data["k_max"] is None
    for bad in ({"radius": 1.0, "contrast": 0.0}, {"radius": 1.0, "contrast": -1.0},
                {"radius": 0.0, "contrast": 1.0}, {"radius": 1.0, "contrast": 1.0, "modes": [-1]}):
        with pytest.raises(ValidationError):
            ItpSchema().load(bad)


def test_experiment_schemas():
    assert set(SUITE_SCHEMAS) == set(SUITES), "every suite has a config schema"
    data = SmallnessSourceSchema().load({"radii": [0.5]})
    assert data["branches"] == [1, 2] and data["intensity"]["kind"] == "constant"
    with pytest.raises(ValidationError):
        SmallnessSourceSchema().load({})
    with pytest.raises(ValidationError):
        CurvatureSourceSchema().load({"K_list": [2.0]})
    with pytest.raises(ValidationError):
        MediumVisibilitySchema().load({})
    assert MediumVisibilitySchema().load({"K_list": [10.0]})["incident"]["kind"] == "plane_wave"
    with pytest.raises(ValidationError):
        SchifferCountingSchema().load({"truth": [], "problem": "source"})
    with pytest.raises(ValidationError):
        SmallnessSourceSchema().load({"radii": [0.5], "alpha": 1.0})
