"""JSON round-trip for bodies and regions (schema version 1)."""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema
import numpy as np

from ..errors import SchemaError
from .bodies import Body, Ellipsoid, PBall, SymPolytope
from .regions import Intersect, MinkowskiAverage, Scale, Translate

SCHEMA_VERSION = 1


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    text = resources.files("spectral_balls.schemas").joinpath(name).read_text()
    return json.loads(text)


def _validator(defn: str):
    schema = load_schema("fixture.schema.json")
    return jsonschema.Draft202012Validator({"$ref": f"#/$defs/{defn}", "$defs": schema["$defs"]})


def validate(doc, defn="region"):
    try:
        _validator(defn).validate(doc)
    except jsonschema.ValidationError as exc:
        raise SchemaError(exc.message) from exc


def _p_to_json(p):
    return "inf" if np.isinf(p) else (int(p) if float(p).is_integer() else p)


def to_dict(region) -> dict:
    if isinstance(region, PBall):
        return {"type": "pball", "p": _p_to_json(region.p), "axes": region.axes.tolist()}
    if isinstance(region, Ellipsoid):
        return {"type": "ellipsoid", "Q": region.Q.tolist()}
    if isinstance(region, SymPolytope):
        return {"type": "polytope", "normals": region.normals.tolist()}
    if isinstance(region, Intersect):
        return {"op": "intersect", "children": [to_dict(c) for c in region.children]}
    if isinstance(region, Translate):
        return {"op": "translate", "v": region.v.tolist(), "child": to_dict(region.child)}
    if isinstance(region, Scale):
        return {"op": "scale", "c": region.c, "child": to_dict(region.child)}
    if isinstance(region, MinkowskiAverage):
        return {"op": "minkavg", "left": to_dict(region.left), "right": to_dict(region.right),
                "lam": region.lam, "directions": region.direction_count}
    raise TypeError(f"cannot serialise {type(region).__name__}")


def _build(doc):
    if "type" in doc:
        kind = doc["type"]
        if kind == "pball":
            p = doc["p"]
            return PBall(np.inf if p == "inf" else p, doc["axes"])
        if kind == "ellipsoid":
            return Ellipsoid(doc["Q"])
        return SymPolytope(doc["normals"])
    op = doc["op"]
    if op == "intersect":
        return Intersect(*[_build(c) for c in doc["children"]])
    if op == "translate":
        return Translate(_build(doc["child"]), doc["v"])
    if op == "scale":
        return Scale(doc["c"], _build(doc["child"]))
    return MinkowskiAverage(_build(doc["left"]), _build(doc["right"]), doc["lam"],
                            doc.get("directions", 720))


def from_dict(doc):
    """Validate ``doc`` against the shipped schema and build the region."""
    validate(doc, "region")
    return _build(doc)


def body_from_dict(doc) -> Body:
    validate(doc, "body")
    return _build(doc)


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc}") from exc
    return from_dict(doc)


def dumps(region) -> str:
    return json.dumps(to_dict(region), sort_keys=True, separators=(",", ":"))


def region_key(region) -> str:
    """Canonical string identifying a region; used for caching estimates."""
    return dumps(region)


def load_fixture_file(path) -> dict:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"malformed JSON in {path}: {exc}") from exc
    try:
        jsonschema.validate(doc, load_schema("fixture.schema.json"))
    except jsonschema.ValidationError as exc:
        raise SchemaError(exc.message) from exc
    return {name: _build(d) for name, d in doc["fixtures"].items()}
