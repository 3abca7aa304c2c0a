"""Deterministic JSON rendering of results (fixed field order, 17 significant digits)."""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math

import numpy as np

from .economy import Economy, FiniteSpace
from .fileformat import economy_to_dict


def jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "points"):
        return jsonable(obj.points())
    return str(obj)


def _encode(v, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(x, indent, level + 1)}" for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(v, list):
        if not v:
            return "[]"
        if all(not isinstance(x, (dict, list)) for x in v):
            return "[" + ", ".join(_encode(x, indent, level + 1) for x in v) + "]"
        items = [pad + _encode(x, indent, level + 1) for x in v]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            return "null"
        return format(v, ".17g")
    return json.dumps(v, ensure_ascii=False)


def dumps(obj, indent: int = 2) -> str:
    return _encode(jsonable(obj), indent, 0) + "\n"


def digest(econ: Economy) -> dict:
    canonical = json.dumps(economy_to_dict(econ), sort_keys=True, separators=(",", ":"))
    return {
        "players": econ.n,
        "spaces": [{"kind": s.kind, "dim": s.dim,
                    **({"size": s.size} if isinstance(s, FiniteSpace) else {})}
                   for s in econ.spaces],
        "constraint": econ.constraint.kind,
        "payoffs": [p.kind for p in econ.payoffs],
        "sha256": hashlib.sha256(canonical.encode()).hexdigest(),
    }
