from marshmallow import Schema, ValidationError, fields, validate, validates_schema


class ItpSchema(Schema):
    dimension = fields.Int(load_default=2, validate=validate.OneOf([2, 3]))
    radius = fields.Float(required=True, validate=validate.Range(min=0, min_inclusive=False))
    contrast = fields.Float(required=True)
    modes = fields.List(fields.Int(validate=validate.Range(min=0)), load_default=lambda: [0])
    k_max = fields.Float(load_default=None, allow_none=True, validate=validate.Range(min=0, min_inclusive=False))
    steps = fields.Int(load_default=2048, validate=validate.Range(min=16))
    alpha = fields.Float(load_default=0.5, validate=validate.Range(min=0, max=1, min_inclusive=False,
                                                                 max_inclusive=False))

    @validates_schema
    def check_index(self, data, **kwargs):
        if 1.0 + data["contrast"] <= 0:
            raise ValidationError("1 + contrast must be positive", "contrast")
        if data["contrast"] == 0:
            raise ValidationError("contrast 0 has no transmission eigenvalues", "contrast")
