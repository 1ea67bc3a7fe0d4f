"""CSV input and deterministic JSON/CSV output."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .curves import Curve, SampledFunction
from .exceptions import ParseError


def _rows(path):
    closed = False
    rows = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.lstrip("#").strip().lower() == "closed":
                closed = True
            continue
        try:
            rows.append((lineno, [float(tok) for tok in line.split(",")]))
        except ValueError:
            raise ParseError(f"{path}:{lineno}: cannot parse {raw!r} as comma-separated numbers") from None
    if not rows:
        raise ParseError(f"{path}: no data rows")
    width = len(rows[0][1])
    for lineno, vals in rows:
        if len(vals) != width:
            raise ParseError(f"{path}:{lineno}: expected {width} columns, found {len(vals)}")
        if not all(math.isfinite(v) for v in vals):
            raise ParseError(f"{path}:{lineno}: non-finite value")
    return np.array([v for _, v in rows]), closed


def read_curve(path) -> Curve:
    data, closed = _rows(path)
    if data.shape[1] < 2:
        raise ParseError(f"{path}: a curve needs at least two columns; use the 1-d reader for functions")
    if data.shape[0] < 2:
        raise ParseError(f"{path}: a curve needs at least two points")
    return Curve(data, closed=closed)


def read_function(path) -> SampledFunction:
    data, _ = _rows(path)
    if data.shape[1] != 1:
        raise ParseError(f"{path}: expected a single column, found {data.shape[1]}")
    if data.shape[0] < 2:
        raise ParseError(f"{path}: a function needs at least two samples")
    return SampledFunction(data[:, 0])


def write_curve(path, points, closed: bool = False) -> None:
    lines = ["# closed"] if closed else []
    lines += [",".join(format_float(v) for v in row) for row in np.asarray(points, dtype=float)]
    Path(path).write_text("\n".join(lines) + "\n")


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def dumps(obj) -> str:
    """JSON text with every float printed to 17 significant digits."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist())
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")
