# app/utils/export.py
"""CSV and JSON writers with fixed number formatting, so reruns produce identical bytes."""
import csv
import json
import math
import os

import numpy as np


def format_number(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return "{:.17g}".format(value)
    return str(value)


def write_csv(path, header, rows):
    _ensure_parent(path)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(v) for v in row])
    return path


def jsonable(value):
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": jsonable(float(value.real)), "im": jsonable(float(value.imag))}
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else format_number(value)
    return value


def write_json(path, payload):
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(jsonable(payload), handle, sort_keys=True, indent=2)
        handle.write("\n")
    return path


def _ensure_parent(path):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def write_field_csv(path, points, values):
    """One row per sample point: x1..xn, re, im."""
    points = np.atleast_2d(points)
    values = np.asarray(values, dtype=complex).ravel()
    header = [f"x{i + 1}" for i in range(points.shape[1])] + ["re", "im"]
    rows = ([*p.tolist(), float(v.real), float(v.imag)] for p, v in zip(points, values))
    return write_csv(path, header, rows)
