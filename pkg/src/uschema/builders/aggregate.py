"""Builders for the aggregate-oriented paradigms: document, key-value and columnar."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import BuildError
from ..model.types import (
    NULL,
    UNBOUNDED,
    Aggregate,
    Attribute,
    EntityType,
    Key,
    ListOf,
    Primitive,
    Reference,
    StructuralVariation,
    TupleOf,
    USchemaModel,
    VariationRef,
)
from ..rawschema import ArrayNode, NullToken, ObjectNode, RefToken, TypedScalar, VariationSchema
from .naming import name_star

KEY_STYLES = ("document", "keyvalue", "columnar")


def leaf_type(node):
    """Data type of a shape that cannot become an aggregate."""
    if isinstance(node, TypedScalar):
        return Primitive(node.kind)
    if isinstance(node, RefToken):
        return Primitive(node.kind)
    if isinstance(node, NullToken):
        return NULL
    if isinstance(node, ArrayNode):
        return collection_type([leaf_type(e) for e in node.elements])
    return Primitive("json")  # objects below a nested array


def collection_type(types: list):
    """List of one element type, or Tuple of the distinct types in appearance order."""
    distinct = []
    for t in types:
        if t not in distinct:
            distinct.append(t)
    if not distinct:
        return ListOf(NULL)
    if len(distinct) == 1:
        return ListOf(distinct[0])
    return TupleOf(tuple(distinct))


@dataclass
class _VarAcc:
    features: tuple
    count: int = 0
    first_ts: int | None = None
    last_ts: int | None = None


@dataclass
class _EntityAcc:
    name: str
    root: bool
    variations: list[_VarAcc] = field(default_factory=list)
    index: dict = field(default_factory=dict)  # features -> variation id

    def add(self, features: tuple, count: int, first_ts=None, last_ts=None) -> int:
        vid = self.index.get(features)
        if vid is None:
            self.variations.append(_VarAcc(features))
            vid = self.index[features] = len(self.variations)
        acc = self.variations[vid - 1]
        acc.count += count
        if first_ts is not None:
            acc.first_ts = first_ts if acc.first_ts is None else min(acc.first_ts, first_ts)
        if last_ts is not None:
            acc.last_ts = last_ts if acc.last_ts is None else max(acc.last_ts, last_ts)
        return vid


class AggregateModelBuilder:
    def __init__(self, db_name: str, key_style: str = "document"):
        if key_style not in KEY_STYLES:
            raise ValueError(f"unknown key style {key_style!r}")
        self.db_name = db_name
        self.key_style = key_style
        self.entities: dict[str, _EntityAcc] = {}
        self.root_names: set[str] = set()

    def build(self, variations: list[VariationSchema]) -> USchemaModel:
        roots = [v for v in variations if v.kind == "entity"]
        if len(roots) != len(variations):
            raise BuildError("aggregate-oriented paradigms have no relationship types")
        self.root_names = {v.name for v in roots}
        for name in sorted(self.root_names):
            self.entities[name] = _EntityAcc(name, True)
        for v in sorted(roots, key=lambda v: (v.name, v.first_seen)):
            feats = self._object_features(v.shape, v.count, root=True)
            self.entities[v.name].add(feats, v.count, v.first_timestamp, v.last_timestamp)
        out = []
        for acc in self.entities.values():
            out.append(EntityType(
                acc.name,
                tuple(StructuralVariation(i, a.count, a.features, a.first_ts, a.last_ts)
                      for i, a in enumerate(acc.variations, start=1)),
                root=acc.root,
            ))
        return USchemaModel(self.db_name, tuple(out), (), paradigm=self.key_style)

    def _embedded(self, prop: str, shape: ObjectNode, count: int) -> VariationRef:
        name = name_star(prop)
        if name in self.root_names:
            raise BuildError(f"embedded property {prop!r} maps to entity {name!r}, "
                             f"which is also a root collection")
        acc = self.entities.get(name)
        if acc is None:
            acc = self.entities[name] = _EntityAcc(name, False)
        feats = self._object_features(shape, count, root=False)
        return VariationRef(name, acc.add(feats, count))

    def _object_features(self, shape: ObjectNode, count: int, root: bool) -> tuple:
        structural: list = []
        logical: list = []
        for name, node in shape.fields:
            if root and name == "_id":
                if self.key_style == "document":
                    structural.append(Attribute("_id", leaf_type(node), is_key=True))
                    logical.append(Key("_id", ("_id",)))
                continue
            if isinstance(node, ObjectNode):
                structural.append(Aggregate(name, (self._embedded(name, node, count),), 1, 1))
            elif isinstance(node, ArrayNode):
                s, l = self._array_features(name, node, count)
                structural.append(s)
                if l is not None:
                    logical.append(l)
            else:
                structural.append(Attribute(name, leaf_type(node)))
                if isinstance(node, RefToken):
                    logical.append(Reference(name, node.target, (name,), 1, 1))
        if root and self.key_style != "document":
            logical.append(Key("_id", ()))
        return tuple(structural + logical)

    def _array_features(self, name: str, node: ArrayNode, count: int):
        elems = node.elements
        if elems and all(isinstance(e, ObjectNode) for e in elems):
            occurrences: dict[ObjectNode, int] = {}
            for e in elems:
                occurrences[e] = occurrences.get(e, 0) + 1
            targets = {self._embedded(name, e, n * count) for e, n in occurrences.items()}
            return Aggregate(name, tuple(sorted(targets)), 1, UNBOUNDED), None
        attr = Attribute(name, leaf_type(node))
        refs = [e.target for e in elems if isinstance(e, RefToken)]
        if refs:
            return attr, Reference(name, refs[0], (name,), 1, UNBOUNDED)
        return attr, None


def build_document(variations: list[VariationSchema], db_name: str) -> USchemaModel:
    return AggregateModelBuilder(db_name, "document").build(variations)


def build_keyvalue(variations: list[VariationSchema], db_name: str) -> USchemaModel:
    return AggregateModelBuilder(db_name, "keyvalue").build(variations)


def build_columnar(variations: list[VariationSchema], db_name: str) -> USchemaModel:
    return AggregateModelBuilder(db_name, "columnar").build(variations)
