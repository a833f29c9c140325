# app/service/scene_service.py
"""Turns validated scene dicts into domains, profiles, incident waves and scenes."""
import json

import numpy as np

from app.models.geometry import (Annulus, Ball, Box, CappedBody, Domain, MollifiedPolygon, StarShape,
                                 make_curvature_cap)
from app.models.grid import GridField
from app.models.scattering_medium import IncidentField, MediumScene
from app.models.scattering_source import SourceScene
from app.schemas.scene_schema import MediumSceneSchema, SourceSceneSchema
from app.utils.errors import ConfigError
from app.utils.expression import parse_expression
from app.utils.logger import logger


def _vector(value, n, name, default=None):
    if value is None:
        if default is None:
            raise ConfigError(f"'{name}' is required")
        return np.asarray(default, dtype=float)
    vector = np.asarray(value, dtype=float)
    if vector.shape != (n,):
        raise ConfigError(f"'{name}' must have {n} entries")
    return vector


class SceneService:
    def load_json(self, path):
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)

    # --- geometry ---
    def build_shapes(self, spec, n):
        kind, params = spec["kind"], spec.get("params") or {}
        try:
            if kind == "union":
                return [shape for part in spec["components"] for shape in self.build_shapes(part, n)]
            if kind == "ball":
                return [Ball(_vector(params.get("center"), n, "center", np.zeros(n)), float(params["radius"]))]
            if kind == "annulus":
                return [Annulus(_vector(params.get("center"), n, "center", np.zeros(n)),
                                float(params["inner_radius"]), float(params["outer_radius"]))]
            if kind == "box":
                return [Box(_vector(params.get("lo"), n, "lo"), _vector(params.get("hi"), n, "hi"))]
            if kind == "star":
                if n != 2:
                    raise ConfigError("star-shaped domains are planar")
                return [StarShape.from_fourier(_vector(params.get("center"), 2, "center", np.zeros(2)),
                                               params["coefficients"])]
            if kind == "polygon":
                if n != 2:
                    raise ConfigError("mollified polygons are planar")
                return [MollifiedPolygon(params["vertices"], float(params["rounding"]))]
            if kind == "capped":
                cap_spec = spec["cap"]
                cap = make_curvature_cap(cap_spec["K"], cap_spec.get("cubic"), L=cap_spec.get("L", 1.0),
                                         M=cap_spec.get("M", 2.0), delta=cap_spec.get("delta", 0.5), n=n)
                apex = cap_spec.get("apex")
                normal = cap_spec.get("normal")
                return [CappedBody(cap, apex=None if apex is None else _vector(apex, n, "apex"),
                                   normal=None if normal is None else _vector(normal, n, "normal"),
                                   bulk_radius=cap_spec.get("bulk_radius"))]
        except KeyError as exc:
            raise ConfigError(f"domain '{kind}' is missing parameter {exc.args[0]!r}") from exc
        raise ConfigError(f"unknown domain kind '{kind}'")

    def build_domain(self, spec, n):
        shapes = self.build_shapes(spec, n)
        if any(shape.n != n for shape in shapes):
            raise ConfigError(f"domain components must live in dimension {n}")
        return Domain(shapes, well_separated=bool(spec.get("well_separated")), name=spec["kind"])

    # --- profiles ---
    def build_profile(self, spec, n):
        """Callable x -> complex values; constants stay plain numbers so solvers can spot them."""
        kind = spec["kind"]
        if kind == "constant":
            value = complex(spec["value"])
            return value.real if value.imag == 0 else value
        if kind == "expression":
            return parse_expression(spec["expression"], n)
        values = spec["values"]
        if isinstance(values, dict):
            values = np.asarray(values.get("re", 0.0), dtype=float) + 1j * np.asarray(values.get("im", 0.0),
                                                                                   dtype=float)
        values = np.asarray(values, dtype=complex)
        if values.ndim != n or min(values.shape) < 2:
            raise ConfigError(f"grid profile values must be an {n}-dimensional array with at least 2 nodes per axis")
        lo = _vector(spec["lo"], n, "lo")
        return GridField(lo, float(spec["spacing"]), values, method="linear")

    @staticmethod
    def as_function(profile):
        if callable(profile):
            return profile
        return lambda x: np.full(np.atleast_2d(x).shape[0], profile, dtype=complex)

    def build_incident(self, spec, k, n):
        if spec is None:
            return IncidentField.plane_wave(k, np.eye(n)[0])
        kind = spec["kind"]
        if kind == "plane_wave":
            return IncidentField.plane_wave(k, _vector(spec.get("direction"), n, "direction", np.eye(n)[0]))
        if kind == "herglotz":
            axis = spec.get("axis")
            return IncidentField.herglotz(k, n, {int(m): g for m, g in spec["modes"].items()},
                                          axis=None if axis is None else _vector(axis, n, "axis"))
        rho = np.asarray(spec["rho"], dtype=complex)
        if rho.shape != (n,):
            raise ConfigError(f"'rho' must have {n} entries")
        return IncidentField.cgo(k, rho)

    # --- scenes ---
    def source_scene(self, data):
        data = SourceSceneSchema().load(data)
        n = data["dimension"]
        domain = self.build_domain(data["domain"], n)
        phi = self.as_function(self.build_profile(data["intensity"], n))
        logger.info(f"Source scene: {domain.name} in R^{n}, k={data['wavenumber']:g}")
        return SourceScene(domain, phi, data["wavenumber"], spacing=data["spacing"]), data

    def medium_scene(self, data):
        data = MediumSceneSchema().load(data)
        n = data["dimension"]
        k = data["wavenumber"]
        domain = self.build_domain(data["domain"], n)
        contrast = self.build_profile(data["contrast"], n)
        incident = self.build_incident(data["incident"], k, n)
        logger.info(f"Medium scene: {domain.name} in R^{n}, k={k:g}, incident {incident.kind}")
        return MediumScene(domain, contrast, k, incident, spacing=data["spacing"]), data
