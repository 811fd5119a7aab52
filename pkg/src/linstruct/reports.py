"""Instance files and report serialization (JSON and CSV)."""

from __future__ import annotations

import dataclasses
import io
import json
import math
import numbers
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .spectral import Instance, SymmetricOperator

CSV_DIGITS = 17


def _number(value, location: str) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise SchemaError(f"expected a number, got {value!r}", location)
    if not math.isfinite(value):
        raise SchemaError("number must be finite", location)
    return float(value)


def instance_from_dict(data) -> Instance:
    """Validate ``{"dim": n, "T": [[...], ...], "z": [...]}`` and build the instance."""
    if not isinstance(data, dict):
        raise SchemaError("top level must be an object", "$")
    for key in ("dim", "T", "z"):
        if key not in data:
            raise SchemaError(f"missing field {key!r}", key)
    n = data["dim"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise SchemaError(f"dim must be a positive integer, got {n!r}", "dim")
    rows = data["T"]
    if not isinstance(rows, list) or len(rows) != n:
        raise SchemaError(f"T must be a list of {n} rows", "T")
    t = np.empty((n, n))
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise SchemaError(f"row must have {n} entries", f"T[{i}]")
        for j, v in enumerate(row):
            t[i, j] = _number(v, f"T[{i}][{j}]")
    z_raw = data["z"]
    if not isinstance(z_raw, list) or len(z_raw) != n:
        raise SchemaError(f"z must be a list of {n} numbers", "z")
    z = np.array([_number(v, f"z[{i}]") for i, v in enumerate(z_raw)])
    return Instance(SymmetricOperator(t), z)


def parse_instance(path) -> Instance:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}") from exc
    return instance_from_dict(data)


def instance_to_dict(inst: Instance) -> dict:
    return {"dim": inst.dim, "T": inst.T.matrix.tolist(), "z": inst.z.tolist()}


def _float(x: float):
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def jsonable(obj):
    """Convert reports to JSON-ready values; infinities become ``"inf"``, NaN becomes null."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, numbers.Integral):
        return int(obj)
    if isinstance(obj, numbers.Real):
        return _float(float(obj))
    return obj


def dumps_json(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, allow_nan=False) + "\n"


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, numbers.Integral):
        return str(int(v))
    if isinstance(v, numbers.Real):
        x = float(v)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, f".{CSV_DIGITS}g")
    return str(v)


def dumps_csv(columns: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_cell(v) for v in row) + "\n")
    return buf.getvalue()
