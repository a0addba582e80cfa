"""Problem files: JSON documents describing a ground set, a span and sets."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional

import jsonschema
import numpy as np

from . import phi_space as ps
from .errors import ParseError, PhiConvexError, ValidationError
from .ground import ExtendedFunction, GroundSet, PointSubset, build_ground_set

_NUM_MATRIX = {"type": "array", "minItems": 1,
               "items": {"type": "array", "minItems": 1, "items": {"type": "number"}}}
_IDS = {"type": "array", "items": {"type": "integer", "minimum": 0}}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "phiconv problem file",
    "type": "object",
    "additionalProperties": False,
    "required": ["ground", "phi"],
    "properties": {
        "ground": {
            "type": "object",
            "additionalProperties": False,
            "minProperties": 1,
            "properties": {"points": _NUM_MATRIX, "metric": _NUM_MATRIX},
        },
        "phi": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["linear", "affine", "distance", "rbf", "table", "indicators", "constants"]},
                "anchors": _IDS,
                "gamma": {"type": "number", "exclusiveMinimum": 0},
                "rows": _NUM_MATRIX,
                "norm": {"enum": list(ps.NORM_KINDS) + list(ps.NORM_ALIASES)},
                "alpha": {"type": "number", "minimum": 0},
                "constants": {"type": "boolean"},
            },
        },
        "f": {
            "type": "object",
            "additionalProperties": False,
            "required": ["values"],
            "properties": {
                "values": {"type": "array", "items": {"type": "number"}},
                "infinite": _IDS,
            },
        },
        "sets": {"type": "object", "additionalProperties": _IDS},
        "task": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "set": {"type": "string"},
                "ambient": {"type": "string"},
                "mode": {"enum": ["extremal", "exposed", "milman"]},
                "seed": {"type": "integer", "minimum": 0},
                "samples": {"type": "integer", "minimum": 1},
                "epsilon": {"type": "number", "exclusiveMinimum": 0},
                "budget": {"type": "integer", "minimum": 0},
                "radius": {"type": "number", "exclusiveMinimum": 0},
                "c": {"type": "array", "items": {"type": "number"}},
                "h": {"type": "array", "items": {"type": "number"}},
                "tol": {"type": "number", "exclusiveMinimum": 0},
            },
        },
    },
}


@dataclass
class Problem:
    ground: GroundSet
    space: ps.PhiSpace
    f: Optional[ExtendedFunction] = None
    sets: Dict[str, PointSubset] = field(default_factory=dict)
    task: dict = field(default_factory=dict)
    source: str = "<input>"

    def subset(self, name: Optional[str]) -> PointSubset:
        """A named set; ``None`` selects the whole ground set."""
        if name is None:
            return self.ground.all()
        if name not in self.sets:
            raise ValidationError(f"unknown set {name!r}; known: {sorted(self.sets)}", f"sets.{name}")
        return self.sets[name]


def parse(text: str, source: str = "<input>") -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, source, e.lineno, e.colno) from None


def _path(parts) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out


def validate(data) -> None:
    v = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(v.iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        e = errors[0]
        raise ValidationError(e.message, _path(e.absolute_path))


def _build_space(g: GroundSet, phi: dict) -> ps.PhiSpace:
    kind = phi["kind"]
    norm = phi.get("norm", "sup_on_K")
    consts = phi.get("constants", False)
    if kind == "linear":
        space = ps.linear(g, norm)
    elif kind == "affine":
        space = ps.affine(g, norm)
    elif kind == "distance":
        space = ps.distance(g, phi.get("anchors"), consts, norm)
    elif kind == "rbf":
        space = ps.rbf(g, phi.get("anchors"), phi.get("gamma", 1.0), consts, norm)
    elif kind == "indicators":
        space = ps.indicators(g, norm)
    elif kind == "constants":
        space = ps.constants_only(g, norm)
    else:
        if "rows" not in phi:
            raise ValidationError("table dictionary needs 'rows'", "phi.rows")
        space = ps.table(g, phi["rows"], norm)
    if "alpha" in phi:
        space = ps.PhiSpace(g, space.eval_matrix, space.norm_kind, phi["alpha"], space.kind)
    return space


def build(data: dict, source: str = "<input>") -> Problem:
    validate(data)
    step = "ground"
    try:
        gd = data["ground"]
        g = build_ground_set(points=gd.get("points"), metric=gd.get("metric"))
        step = "phi"
        space = _build_space(g, data["phi"])
        f = None
        if "f" in data:
            step = "f"
            f = ExtendedFunction.from_table(g, data["f"]["values"], data["f"].get("infinite", ()))
        sets = {}
        for name, ids in data.get("sets", {}).items():
            step = f"sets.{name}"
            sets[name] = PointSubset.of(g, ids)
    except ValidationError:
        raise
    except PhiConvexError as e:
        raise ValidationError(f"{type(e).__name__}: {e}", step) from e
    return Problem(g, space, f, sets, dict(data.get("task", {})), source)


def load(path) -> Problem:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ParseError(str(e), str(path), 0, 0) from None
    return build(parse(text, str(path)), str(path))


def problem_dict(g: GroundSet, phi: dict, sets=None, f: Optional[ExtendedFunction] = None) -> dict:
    """The JSON form of a problem; used by the gallery to emit reproducible inputs."""
    d = {"ground": {"points": g.coords.tolist()} if g.coords is not None else {"metric": g.dist.tolist()},
         "phi": dict(phi)}
    if sets:
        d["sets"] = {k: [int(i) for i in v] for k, v in sets.items()}
    if f is not None:
        d["f"] = {"values": f.values.tolist(), "infinite": np.flatnonzero(~f.finite_mask).tolist()}
    return d
