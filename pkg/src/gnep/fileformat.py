"""JSON economy files.

    {"players": N,
     "spaces": [{"type": "finite", "labels": [...], "points": [[...], ...]}
                | {"type": "box", "lower": [...], "upper": [...]}],
     "constraint": {"type": "unconstrained"}
                   | {"type": "shared", "inequalities": ["expr", ...]}
                   | {"type": "bounds", "entries": [{"player": i, "coord": k,
                                                    "lower": "expr", "upper": "expr"}]},
     "payoffs": [{"type": "table", "entries": [{"profile": [...], "deviation": "D",
                                                "value": 5.0}, ...]}
                 | {"type": "formula", "expr": "..."}]}

Inequalities mean g(x) <= 0.
"""
from __future__ import annotations

import itertools
import json

import numpy as np

from . import expr as ex
from .economy import (
    BoundEntry, BoundExprs, BoxSpace, Economy, EconomyError, FiniteSpace, FormulaPayoff,
    Shared, TablePayoff, Unconstrained,
)


class SchemaError(EconomyError):
    pass


def _require(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"{where}: missing field {key!r}")
    return obj[key]


def _expr(text, where):
    if not isinstance(text, str):
        raise SchemaError(f"{where}: expected an expression string")
    try:
        return ex.parse(text)
    except ex.ExpressionSyntaxError as err:
        raise SchemaError(f"{where}: {err}") from None


def _space(d, where):
    kind = _require(d, "type", where)
    if kind == "finite":
        labels = _require(d, "labels", where)
        if not isinstance(labels, list):
            raise SchemaError(f"{where}: labels must be a list")
        return FiniteSpace.of(labels, d.get("points"))
    if kind == "box":
        return BoxSpace.of(_require(d, "lower", where), _require(d, "upper", where))
    raise SchemaError(f"{where}: unknown space type {kind!r}")


def _constraint(d, where):
    kind = _require(d, "type", where)
    if kind == "unconstrained":
        return Unconstrained()
    if kind == "shared":
        ineqs = _require(d, "inequalities", where)
        return Shared(tuple(_expr(t, f"{where}.inequalities[{k}]") for k, t in enumerate(ineqs)))
    if kind == "bounds":
        entries = []
        for k, e in enumerate(_require(d, "entries", where)):
            w = f"{where}.entries[{k}]"
            lo = e.get("lower")
            hi = e.get("upper")
            entries.append(BoundEntry(int(_require(e, "player", w)), int(_require(e, "coord", w)),
                                      None if lo is None else _expr(lo, w + ".lower"),
                                      None if hi is None else _expr(hi, w + ".upper")))
        return BoundExprs(tuple(entries))
    raise SchemaError(f"{where}: unknown constraint type {kind!r}")


def _table(d, spaces, i, where):
    shape = tuple(s.size for s in spaces) + (spaces[i].size,)
    values = np.full(shape, np.nan)
    for k, e in enumerate(_require(d, "entries", where)):
        w = f"{where}.entries[{k}]"
        profile = _require(e, "profile", w)
        if len(profile) != len(spaces):
            raise SchemaError(f"{w}: profile has {len(profile)} entries, expected {len(spaces)}")
        try:
            idx = tuple(s.index[str(p)] for s, p in zip(spaces, profile))
            idx += (spaces[i].index[str(_require(e, "deviation", w))],)
        except KeyError as err:
            raise SchemaError(f"{w}: unknown label {err}") from None
        if not np.isnan(values[idx]):
            raise SchemaError(f"{w}: duplicate entry")
        values[idx] = float(_require(e, "value", w))
    if np.isnan(values).any():
        raise SchemaError(f"{where}: table is missing {int(np.isnan(values).sum())} entries")
    return TablePayoff(values)


def economy_from_dict(d: dict) -> Economy:
    n = _require(d, "players", "economy")
    spaces_raw = _require(d, "spaces", "economy")
    payoffs_raw = _require(d, "payoffs", "economy")
    if not isinstance(n, int) or n < 1:
        raise SchemaError("economy: players must be a positive integer")
    if len(spaces_raw) != n or len(payoffs_raw) != n:
        raise SchemaError(f"economy: expected {n} spaces and {n} payoffs")
    spaces = tuple(_space(s, f"spaces[{k}]") for k, s in enumerate(spaces_raw))
    constraint = _constraint(d.get("constraint", {"type": "unconstrained"}), "constraint")
    payoffs = []
    for k, p in enumerate(payoffs_raw):
        w = f"payoffs[{k}]"
        kind = _require(p, "type", w)
        if kind == "table":
            if not all(isinstance(s, FiniteSpace) for s in spaces):
                raise SchemaError(f"{w}: table payoffs need all spaces finite")
            payoffs.append(_table(p, spaces, k, w))
        elif kind == "formula":
            payoffs.append(FormulaPayoff(_expr(_require(p, "expr", w), w + ".expr")))
        else:
            raise SchemaError(f"{w}: unknown payoff type {kind!r}")
    return Economy(spaces, constraint, tuple(payoffs))


def economy_to_dict(econ: Economy) -> dict:
    spaces = []
    for s in econ.spaces:
        if isinstance(s, FiniteSpace):
            spaces.append({"type": "finite", "labels": list(s.labels),
                           "points": [list(p) for p in s.points]})
        else:
            spaces.append({"type": "box", "lower": list(s.lower), "upper": list(s.upper)})
    c = econ.constraint
    if isinstance(c, Unconstrained):
        constraint = {"type": "unconstrained"}
    elif isinstance(c, Shared):
        constraint = {"type": "shared", "inequalities": [ex.to_text(g) for g in c.inequalities]}
    else:
        constraint = {"type": "bounds", "entries": [
            {"player": e.player, "coord": e.coord,
             "lower": None if e.lower is None else ex.to_text(e.lower),
             "upper": None if e.upper is None else ex.to_text(e.upper)}
            for e in c.entries]}
    payoffs = []
    for i, p in enumerate(econ.payoffs):
        if isinstance(p, FormulaPayoff):
            payoffs.append({"type": "formula", "expr": ex.to_text(p.expr)})
            continue
        entries = []
        own = econ.spaces[i].labels
        for profile in itertools.product(*(s.labels for s in econ.spaces)):
            idx = econ.profile_index(profile)
            for j, dev in enumerate(own):
                entries.append({"profile": list(profile), "deviation": dev,
                                "value": float(p.values[idx + (j,)])})
        payoffs.append({"type": "table", "entries": entries})
    return {"players": econ.n, "spaces": spaces, "constraint": constraint, "payoffs": payoffs}


def loads(text: str) -> Economy:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise SchemaError(f"invalid JSON at line {err.lineno}, column {err.colno}: {err.msg}") from None
    return economy_from_dict(data)


def load(path) -> Economy:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dumps(econ: Economy) -> str:
    return json.dumps(economy_to_dict(econ), indent=1)
