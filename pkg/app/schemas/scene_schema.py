# app/schemas/scene_schema.py

from marshmallow import Schema, ValidationError, fields, validate, validates_schema

DOMAIN_KINDS = ["ball", "annulus", "box", "star", "polygon", "capped", "union"]
PROFILE_KINDS = ["constant", "expression", "grid"]
INCIDENT_KINDS = ["plane_wave", "herglotz", "cgo"]


class ComplexField(fields.Field):
    """A number, or {"re": .., "im": ..}."""

    def _deserialize(self, value, attr, data, **kwargs):
        if isinstance(value, bool):
            raise ValidationError("expected a number")
        if isinstance(value, (int, float)):
            return complex(value)
        if isinstance(value, dict) and set(value) <= {"re", "im"}:
            try:
                return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
            except (TypeError, ValueError):
                raise ValidationError("re and im must be numbers")
        raise ValidationError("expected a number or an object with re/im")


class CapSchema(Schema):
    K = fields.Float(required=True, validate=validate.Range(min=2.718281828459045))
    L = fields.Float(load_default=1.0, validate=validate.Range(min=0, min_inclusive=False))
    M = fields.Float(load_default=2.0, validate=validate.Range(min=1))
    delta = fields.Float(load_default=0.5, validate=validate.Range(min=0, min_inclusive=False))
    cubic = fields.Dict(load_default=None, allow_none=True)
    apex = fields.List(fields.Float(), load_default=None, allow_none=True)
    normal = fields.List(fields.Float(), load_default=None, allow_none=True)
    bulk_radius = fields.Float(load_default=None, allow_none=True)


class DomainSchema(Schema):
    kind = fields.Str(required=True, validate=validate.OneOf(DOMAIN_KINDS))
    params = fields.Dict(load_default=dict)
    cap = fields.Nested(CapSchema, load_default=None, allow_none=True)
    components = fields.List(fields.Nested(lambda: DomainSchema()), load_default=None, allow_none=True)
    well_separated = fields.Bool(load_default=False)

    @validates_schema
    def check_kind(self, data, **kwargs):
        if data["kind"] == "capped" and not data.get("cap"):
            raise ValidationError("a capped domain needs a 'cap' block", "cap")
        if data["kind"] == "union" and not data.get("components"):
            raise ValidationError("a union needs at least one component", "components")


class ProfileSchema(Schema):
    """Intensity or contrast profile."""
    kind = fields.Str(required=True, validate=validate.OneOf(PROFILE_KINDS))
    value = ComplexField(load_default=None, allow_none=True)
    expression = fields.Str(load_default=None, allow_none=True)
    lo = fields.List(fields.Float(), load_default=None, allow_none=True)
    spacing = fields.Float(load_default=None, allow_none=True, validate=validate.Range(min=0, min_inclusive=False))
    values = fields.Raw(load_default=None, allow_none=True)

    @validates_schema
    def check_kind(self, data, **kwargs):
        kind = data["kind"]
        if kind == "constant" and data.get("value") is None:
            raise ValidationError("a constant profile needs 'value'", "value")
        if kind == "expression" and not data.get("expression"):
            raise ValidationError("an expression profile needs 'expression'", "expression")
        if kind == "grid":
            missing = [key for key in ("lo", "spacing", "values") if data.get(key) is None]
            if missing:
                raise ValidationError(f"a grid profile needs {missing}", "values")


class IncidentSchema(Schema):
    kind = fields.Str(required=True, validate=validate.OneOf(INCIDENT_KINDS))
    direction = fields.List(fields.Float(), load_default=None, allow_none=True)
    modes = fields.Dict(keys=fields.Str(), values=ComplexField(), load_default=None, allow_none=True)
    axis = fields.List(fields.Float(), load_default=None, allow_none=True)
    rho = fields.List(ComplexField(), load_default=None, allow_none=True)

    @validates_schema
    def check_kind(self, data, **kwargs):
        if data["kind"] == "herglotz" and not data.get("modes"):
            raise ValidationError("a Herglotz incident wave needs 'modes'", "modes")
        if data["kind"] == "cgo" and not data.get("rho"):
            raise ValidationError("a CGO incident wave needs 'rho'", "rho")


class OutputSchema(Schema):
    spacing = fields.Float(load_default=None, allow_none=True, validate=validate.Range(min=0, min_inclusive=False))
    padding = fields.Float(load_default=0.0, validate=validate.Range(min=0))


class SceneSchema(Schema):
    dimension = fields.Int(required=True, validate=validate.OneOf([1, 2, 3]))
    wavenumber = fields.Float(required=True, validate=validate.Range(min=0, min_inclusive=False))
    domain = fields.Nested(DomainSchema, required=True)
    intensity = fields.Nested(ProfileSchema, load_default=None, allow_none=True)
    contrast = fields.Nested(ProfileSchema, load_default=None, allow_none=True)
    incident = fields.Nested(IncidentSchema, load_default=None, allow_none=True)
    spacing = fields.Float(load_default=None, allow_none=True, validate=validate.Range(min=0, min_inclusive=False))
    fields_output = fields.Nested(OutputSchema, data_key="fields", load_default=lambda: {"spacing": None,
                                                                                         "padding": 0.0})

    @validates_schema
    def check_profiles(self, data, **kwargs):
        if data.get("intensity") is not None and data.get("contrast") is not None:
            raise ValidationError("give either 'intensity' (source) or 'contrast' (medium), not both")


class SourceSceneSchema(SceneSchema):
    @validates_schema
    def check_source(self, data, **kwargs):
        if data.get("intensity") is None:
            raise ValidationError("a source scene needs 'intensity'", "intensity")


class MediumSceneSchema(SceneSchema):
    @validates_schema
    def check_medium(self, data, **kwargs):
        if data.get("contrast") is None:
            raise ValidationError("a medium scene needs 'contrast'", "contrast")
        if data["dimension"] not in (2, 3):
            raise ValidationError("medium scattering is implemented for dimension 2 or 3", "dimension")
