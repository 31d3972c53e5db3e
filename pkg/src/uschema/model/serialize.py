"""JSON model file format."""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import ParseError
from .canonical import encode_type
from .types import (
    Aggregate,
    Attribute,
    EntityType,
    Key,
    ListOf,
    MapOf,
    NULL,
    Primitive,
    Reference,
    ReferenceLocator,
    RelationshipType,
    SetOf,
    StructuralVariation,
    TupleOf,
    USchemaModel,
    VariationRef,
    check_invariants,
)


def model_to_dict(model: USchemaModel) -> dict:
    doc = {"name": model.name, "flavor": model.flavor}
    if model.paradigm is not None:
        doc["paradigm"] = model.paradigm
    doc["entities"] = [
        {"name": e.name, "root": e.root, "parents": list(e.parents),
         "variations": [_variation_to_dict(v) for v in e.variations]}
        for e in model.entities
    ]
    doc["relationships"] = [
        {"name": r.name, "variations": [_variation_to_dict(v) for v in r.variations]}
        for r in model.relationships
    ]
    return doc


def _variation_to_dict(v: StructuralVariation) -> dict:
    d = {"id": v.id, "count": v.count}
    if v.first_timestamp is not None:
        d["firstTimestamp"] = v.first_timestamp
    if v.last_timestamp is not None:
        d["lastTimestamp"] = v.last_timestamp
    d["features"] = [_feature_to_dict(f) for f in v.features]
    return d


def _feature_to_dict(f) -> dict:
    if isinstance(f, Attribute):
        return {"kind": "attribute", "name": f.name, "type": encode_type(f.type),
                "optional": f.optional, "isKeyMember": f.is_key}
    if isinstance(f, Key):
        return {"kind": "key", "name": f.name, "attributeNames": list(f.attributes)}
    if isinstance(f, Reference):
        d = {"kind": "reference", "name": f.name, "refsTo": f.refs_to,
             "attributeNames": list(f.attributes), "lowerBound": f.lower_bound,
             "upperBound": f.upper_bound, "optional": f.optional}
        if f.opposite is not None:
            d["opposite"] = {"entity": f.opposite.entity, "variation": f.opposite.variation,
                             "reference": f.opposite.reference}
        if f.featured_by is not None:
            d["isFeaturedBy"] = {"relationship": f.featured_by.type_name,
                                 "variation": f.featured_by.variation}
        return d
    if isinstance(f, Aggregate):
        return {"kind": "aggregate", "name": f.name,
                "aggregates": [{"entity": t.type_name, "variation": t.variation}
                               for t in f.aggregates],
                "lowerBound": f.lower_bound, "upperBound": f.upper_bound,
                "optional": f.optional}
    raise TypeError(f"not a feature: {f!r}")


def serialize(model: USchemaModel) -> bytes:
    return (json.dumps(model_to_dict(model), indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def save_model(model: USchemaModel, path) -> None:
    Path(path).write_bytes(serialize(model))


# -- reading ----------------------------------------------------------------

def _need(d, key, typ, where):
    if not isinstance(d, dict):
        raise ParseError(f"{where}: expected an object")
    if key not in d:
        raise ParseError(f"{where}: missing field {key!r}")
    val = d[key]
    if typ is int and isinstance(val, bool):
        raise ParseError(f"{where}: field {key!r} must be an integer")
    if not isinstance(val, typ):
        raise ParseError(f"{where}: field {key!r} has wrong type {type(val).__name__}")
    return val


def _opt(d, key, typ, default, where):
    if key not in d:
        return default
    return _need(d, key, typ, where)


def decode_type(d, where="type"):
    kind = _need(d, "kind", str, where)
    if kind == "primitive":
        return Primitive(_need(d, "name", str, where))
    if kind == "null":
        return NULL
    if kind == "list":
        return ListOf(decode_type(_need(d, "element", dict, where), where))
    if kind == "set":
        return SetOf(decode_type(_need(d, "element", dict, where), where))
    if kind == "tuple":
        elems = _need(d, "elements", list, where)
        if not elems:
            raise ParseError(f"{where}: tuple type needs at least one element")
        return TupleOf(tuple(decode_type(e, where) for e in elems))
    if kind == "map":
        return MapOf(decode_type(_need(d, "key", dict, where), where),
                     decode_type(_need(d, "value", dict, where), where))
    raise ParseError(f"{where}: unknown data type kind {kind!r}")


def _decode_feature(d, where):
    kind = _need(d, "kind", str, where)
    name = _need(d, "name", str, where)
    where = f"{where}/{name}"
    if kind == "attribute":
        return Attribute(name, decode_type(_need(d, "type", dict, where), where),
                         optional=_opt(d, "optional", bool, False, where),
                         is_key=_opt(d, "isKeyMember", bool, False, where))
    if kind == "key":
        return Key(name, tuple(_strs(_opt(d, "attributeNames", list, [], where), where)))
    if kind == "reference":
        opp = d.get("opposite")
        fb = d.get("isFeaturedBy")
        return Reference(
            name,
            _need(d, "refsTo", str, where),
            tuple(_strs(_opt(d, "attributeNames", list, [], where), where)),
            lower_bound=_opt(d, "lowerBound", int, 1, where),
            upper_bound=_opt(d, "upperBound", int, 1, where),
            optional=_opt(d, "optional", bool, False, where),
            opposite=None if opp is None else ReferenceLocator(
                _need(opp, "entity", str, where), _need(opp, "variation", int, where),
                _need(opp, "reference", str, where)),
            featured_by=None if fb is None else VariationRef(
                _need(fb, "relationship", str, where), _need(fb, "variation", int, where)),
        )
    if kind == "aggregate":
        targets = tuple(
            VariationRef(_need(t, "entity", str, where), _need(t, "variation", int, where))
            for t in _need(d, "aggregates", list, where)
        )
        return Aggregate(name, targets,
                         lower_bound=_opt(d, "lowerBound", int, 1, where),
                         upper_bound=_opt(d, "upperBound", int, 1, where),
                         optional=_opt(d, "optional", bool, False, where))
    raise ParseError(f"{where}: unknown feature kind {kind!r}")


def _strs(xs, where):
    for x in xs:
        if not isinstance(x, str):
            raise ParseError(f"{where}: attribute names must be strings")
    return xs


def _decode_variation(d, where):
    vid = _need(d, "id", int, where)
    where = f"{where}/variations[{vid}]"
    return StructuralVariation(
        id=vid,
        count=_opt(d, "count", int, 0, where),
        features=tuple(_decode_feature(f, f"{where}/features")
                       for f in _opt(d, "features", list, [], where)),
        first_timestamp=_opt(d, "firstTimestamp", int, None, where),
        last_timestamp=_opt(d, "lastTimestamp", int, None, where),
    )


def model_from_dict(doc) -> USchemaModel:
    name = _need(doc, "name", str, "model")
    entities = []
    for e in _opt(doc, "entities", list, [], "model"):
        ename = _need(e, "name", str, "entity")
        where = f"entities/{ename}"
        entities.append(EntityType(
            ename,
            tuple(_decode_variation(v, where) for v in _need(e, "variations", list, where)),
            root=_opt(e, "root", bool, True, where),
            parents=tuple(_strs(_opt(e, "parents", list, [], where), where)),
        ))
    rels = []
    for r in _opt(doc, "relationships", list, [], "model"):
        rname = _need(r, "name", str, "relationship")
        where = f"relationships/{rname}"
        rels.append(RelationshipType(
            rname, tuple(_decode_variation(v, where) for v in _need(r, "variations", list, where))))
    model = USchemaModel(name, tuple(entities), tuple(rels),
                         flavor=_opt(doc, "flavor", str, "full", "model"),
                         paradigm=_opt(doc, "paradigm", str, None, "model"))
    check_invariants(model)
    return model


def deserialize(data: bytes | str) -> USchemaModel:
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"model document is not valid JSON: {exc}") from None
    return model_from_dict(doc)


def load_model(path) -> USchemaModel:
    p = Path(path)
    try:
        return deserialize(p.read_bytes())
    except ParseError as exc:
        raise ParseError(str(exc), source=str(p)) from None
