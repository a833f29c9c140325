# app/schemas/experiment_schema.py

from marshmallow import Schema, ValidationError, fields, validate, validates_schema

from app.schemas.scene_schema import ComplexField, DomainSchema, IncidentSchema, ProfileSchema

_positive = validate.Range(min=0, min_inclusive=False)
_holder = validate.Range(min=0, max=1, min_inclusive=False, max_inclusive=False)


def _constant(value):
    return lambda: {"kind": "constant", "value": value, "expression": None, "lo": None, "spacing": None,
                    "values": None}


def _plane_wave():
    return {"kind": "plane_wave", "direction": None, "modes": None, "axis": None, "rho": None}


class SmallnessSourceSchema(Schema):
    dimension = fields.Int(load_default=2, validate=validate.OneOf([2, 3]))
    wavenumber = fields.Float(load_default=1.0, validate=_positive)
    alpha = fields.Float(load_default=0.5, validate=_holder)
    radii = fields.List(fields.Float(validate=_positive), required=True, validate=validate.Length(min=1))
    branches = fields.List(fields.Int(validate=validate.Range(min=1)), load_default=lambda: [1, 2])
    intensity = fields.Nested(ProfileSchema, load_default=_constant(1.0))
    include_zero = fields.Bool(load_default=True)
    n_dirs = fields.Int(load_default=64, validate=validate.Range(min=8))
    spacing = fields.Float(load_default=None, allow_none=True, validate=_positive)
    floor = fields.Float(load_default=1e-6, validate=_positive)


class CurvatureSourceSchema(Schema):
    dimension = fields.Int(load_default=2, validate=validate.OneOf([2, 3]))
    wavenumber = fields.Float(load_default=1.0, validate=_positive)
    alpha = fields.Float(load_default=0.5, validate=_holder)
    delta = fields.Float(load_default=0.5, validate=_positive)
    L = fields.Float(load_default=1.0, validate=_positive)
    M = fields.Float(load_default=2.0, validate=validate.Range(min=1))
    K_list = fields.List(fields.Float(validate=validate.Range(min=2.718281828459045)), required=True,
                         validate=validate.Length(min=1))
    cubic = fields.Dict(load_default=None, allow_none=True)
    bulk_radius = fields.Float(load_default=1.0, validate=_positive)
    n_dirs = fields.Int(load_default=64, validate=validate.Range(min=8))
    spacing = fields.Float(load_default=None, allow_none=True, validate=_positive)
    floor = fields.Float(load_default=1e-6, validate=_positive)


class MediumVisibilitySchema(Schema):
    dimension = fields.Int(load_default=2, validate=validate.OneOf([2, 3]))
    wavenumber = fields.Float(load_default=1.0, validate=_positive)
    alpha = fields.Float(load_default=0.5, validate=_holder)
    delta = fields.Float(load_default=0.5, validate=_positive)
    L = fields.Float(load_default=1.0, validate=_positive)
    M = fields.Float(load_default=2.0, validate=validate.Range(min=1))
    contrast = ComplexField(load_default=0.1)
    incident = fields.Nested(IncidentSchema, load_default=_plane_wave)
    radii = fields.List(fields.Float(validate=_positive), load_default=list)
    K_list = fields.List(fields.Float(validate=validate.Range(min=2.718281828459045)), load_default=list)
    bulk_radius = fields.Float(load_default=1.0, validate=_positive)
    include_control = fields.Bool(load_default=True)
    tol = fields.Float(load_default=1e-8, validate=_positive)
    max_iter = fields.Int(load_default=200, validate=validate.Range(min=1))
    n_dirs = fields.Int(load_default=64, validate=validate.Range(min=8))
    spacing = fields.Float(load_default=None, allow_none=True, validate=_positive)
    floor = fields.Float(load_default=1e-3, validate=_positive)

    @validates_schema
    def check_scenes(self, data, **kwargs):
        if not data["radii"] and not data["K_list"]:
            raise ValidationError("give 'radii' and/or 'K_list'", "radii")


class MediumPartSchema(Schema):
    """One side of a comparison: a domain with its contrast."""
    domain = fields.Nested(DomainSchema, required=True)
    contrast = fields.Nested(ProfileSchema, load_default=_constant(0.1))


class PairSchema(Schema):
    name = fields.Str(required=True)
    a = fields.Nested(MediumPartSchema, required=True)
    b = fields.Nested(MediumPartSchema, required=True)


class SchifferSeparationSchema(Schema):
    dimension = fields.Int(load_default=2, validate=validate.OneOf([2, 3]))
    wavenumber = fields.Float(load_default=0.3, validate=_positive)
    incident = fields.Nested(IncidentSchema, load_default=_plane_wave)
    pairs = fields.List(fields.Nested(PairSchema), required=True, validate=validate.Length(min=1))
    tol = fields.Float(load_default=1e-8, validate=_positive)
    max_iter = fields.Int(load_default=200, validate=validate.Range(min=1))
    n_dirs = fields.Int(load_default=64, validate=validate.Range(min=8))
    spacing = fields.Float(load_default=None, allow_none=True, validate=_positive)
    floor = fields.Float(load_default=1e-3, validate=_positive)


class CandidateSchema(Schema):
    name = fields.Str(required=True)
    components = fields.List(fields.Nested(DomainSchema), load_default=list)


class GeneratedCandidatesSchema(Schema):
    count = fields.Int(load_default=10, validate=validate.Range(min=0))
    perturbed = fields.Int(load_default=2, validate=validate.Range(min=0))
    seed = fields.Int(load_default=None, allow_none=True)


class SchifferCountingSchema(Schema):
    problem = fields.Str(load_default="medium", validate=validate.OneOf(["medium", "source"]))
    dimension = fields.Int(load_default=2, validate=validate.OneOf([2, 3]))
    wavenumber = fields.Float(load_default=0.3, validate=_positive)
    incident = fields.Nested(IncidentSchema, load_default=_plane_wave)
    profile = fields.Nested(ProfileSchema, load_default=_constant(0.1))
    truth = fields.List(fields.Nested(DomainSchema), required=True, validate=validate.Length(min=1))
    candidates = fields.List(fields.Nested(CandidateSchema), load_default=list)
    generate = fields.Nested(GeneratedCandidatesSchema, load_default=lambda: {"count": 10, "perturbed": 2,
                                                                              "seed": None})
    include_empty = fields.Bool(load_default=True)
    tol = fields.Float(load_default=1e-8, validate=_positive)
    max_iter = fields.Int(load_default=200, validate=validate.Range(min=1))
    n_dirs = fields.Int(load_default=64, validate=validate.Range(min=8))
    spacing = fields.Float(load_default=None, allow_none=True, validate=_positive)
    floor = fields.Float(load_default=1e-3, validate=_positive)


class CurvatureUniquenessSchema(Schema):
    dimension = fields.Int(load_default=2, validate=validate.OneOf([2, 3]))
    wavenumber = fields.Float(load_default=0.3, validate=_positive)
    incident = fields.Nested(IncidentSchema, load_default=_plane_wave)
    pairs = fields.List(fields.Nested(PairSchema), required=True, validate=validate.Length(min=1))
    grid_resolution = fields.Float(load_default=None, allow_none=True, validate=_positive)
    tol = fields.Float(load_default=1e-8, validate=_positive)
    max_iter = fields.Int(load_default=200, validate=validate.Range(min=1))
    n_dirs = fields.Int(load_default=64, validate=validate.Range(min=8))
    spacing = fields.Float(load_default=None, allow_none=True, validate=_positive)
    floor = fields.Float(load_default=1e-4, validate=_positive)


SUITE_SCHEMAS = {
    "smallness-source": SmallnessSourceSchema,
    "curvature-source": CurvatureSourceSchema,
    "medium-visibility": MediumVisibilitySchema,
    "schiffer-separation": SchifferSeparationSchema,
    "schiffer-counting": SchifferCountingSchema,
    "curvature-uniqueness": CurvatureUniquenessSchema,
}
