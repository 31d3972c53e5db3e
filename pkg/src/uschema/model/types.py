"""U-Schema metamodel: schema types, structural variations, features and data types.

All classes are frozen dataclasses holding tuples, so a model is immutable once
constructed and can be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import ClassVar, Iterator, NamedTuple, Union

from ..errors import ModelError

UNBOUNDED = -1

PRIMITIVE_KINDS = ("string", "number", "boolean", "timestamp", "blob", "json")


# -- data types -------------------------------------------------------------

@dataclass(frozen=True)
class Primitive:
    name: str


@dataclass(frozen=True)
class NullType:
    pass


@dataclass(frozen=True)
class ListOf:
    element: DataType


@dataclass(frozen=True)
class TupleOf:
    elements: tuple[DataType, ...]


@dataclass(frozen=True)
class SetOf:
    element: DataType


@dataclass(frozen=True)
class MapOf:
    key: DataType
    value: DataType


DataType = Union[Primitive, NullType, ListOf, TupleOf, SetOf, MapOf]

NULL = NullType()
STRING = Primitive("string")
NUMBER = Primitive("number")
BOOLEAN = Primitive("boolean")


def type_label(t: DataType) -> str:
    """Short human readable rendering, e.g. ``List<number>``."""
    if isinstance(t, Primitive):
        return t.name
    if isinstance(t, NullType):
        return "null"
    if isinstance(t, ListOf):
        return f"List<{type_label(t.element)}>"
    if isinstance(t, SetOf):
        return f"Set<{type_label(t.element)}>"
    if isinstance(t, TupleOf):
        return "Tuple<" + ", ".join(type_label(e) for e in t.elements) + ">"
    if isinstance(t, MapOf):
        return f"Map<{type_label(t.key)}, {type_label(t.value)}>"
    raise TypeError(f"not a data type: {t!r}")


# -- features ---------------------------------------------------------------

class VariationRef(NamedTuple):
    """Points at variation ``variation`` of schema type ``type_name``."""

    type_name: str
    variation: int


class ReferenceLocator(NamedTuple):
    entity: str
    variation: int
    reference: str


@dataclass(frozen=True)
class Attribute:
    name: str
    type: DataType
    optional: bool = False
    is_key: bool = False

    kind: ClassVar[str] = "attribute"


@dataclass(frozen=True)
class Key:
    name: str
    attributes: tuple[str, ...] = ()

    kind: ClassVar[str] = "key"


@dataclass(frozen=True)
class Reference:
    name: str
    refs_to: str
    attributes: tuple[str, ...] = ()
    lower_bound: int = 1
    upper_bound: int = 1
    optional: bool = False
    opposite: ReferenceLocator | None = None
    featured_by: VariationRef | None = None

    kind: ClassVar[str] = "reference"


@dataclass(frozen=True)
class Aggregate:
    name: str
    aggregates: tuple[VariationRef, ...]
    lower_bound: int = 1
    upper_bound: int = 1
    optional: bool = False

    kind: ClassVar[str] = "aggregate"


Feature = Union[Attribute, Key, Reference, Aggregate]

FEATURE_ORDER = {"key": 0, "attribute": 1, "reference": 2, "aggregate": 3}


# -- schema types -----------------------------------------------------------

@dataclass(frozen=True)
class StructuralVariation:
    id: int
    count: int = 0
    features: tuple[Feature, ...] = ()
    first_timestamp: int | None = None
    last_timestamp: int | None = None

    def attributes(self) -> list[Attribute]:
        return [f for f in self.features if isinstance(f, Attribute)]

    def references(self) -> list[Reference]:
        return [f for f in self.features if isinstance(f, Reference)]

    def aggregates(self) -> list[Aggregate]:
        return [f for f in self.features if isinstance(f, Aggregate)]

    def keys(self) -> list[Key]:
        return [f for f in self.features if isinstance(f, Key)]

    def feature_names(self) -> list[str]:
        return [f.name for f in self.features]


@dataclass(frozen=True)
class EntityType:
    name: str
    variations: tuple[StructuralVariation, ...]
    root: bool = True
    parents: tuple[str, ...] = ()

    def variation(self, vid: int) -> StructuralVariation:
        for v in self.variations:
            if v.id == vid:
                return v
        raise KeyError(f"{self.name} has no variation {vid}")

    @property
    def total_count(self) -> int:
        return sum(v.count for v in self.variations)


@dataclass(frozen=True)
class RelationshipType:
    name: str
    variations: tuple[StructuralVariation, ...]

    def variation(self, vid: int) -> StructuralVariation:
        for v in self.variations:
            if v.id == vid:
                return v
        raise KeyError(f"{self.name} has no variation {vid}")

    @property
    def total_count(self) -> int:
        return sum(v.count for v in self.variations)


SchemaType = Union[EntityType, RelationshipType]


@dataclass(frozen=True)
class USchemaModel:
    name: str
    entities: tuple[EntityType, ...] = ()
    relationships: tuple[RelationshipType, ...] = ()
    flavor: str = "full"
    paradigm: str | None = field(default=None, compare=False)

    @cached_property
    def _entity_index(self) -> dict[str, EntityType]:
        return {e.name: e for e in self.entities}

    @cached_property
    def _relationship_index(self) -> dict[str, RelationshipType]:
        return {r.name: r for r in self.relationships}

    def entity(self, name: str) -> EntityType:
        return self._entity_index[name]

    def has_entity(self, name: str) -> bool:
        return name in self._entity_index

    def relationship(self, name: str) -> RelationshipType:
        return self._relationship_index[name]

    def has_relationship(self, name: str) -> bool:
        return name in self._relationship_index

    def schema_types(self) -> Iterator[SchemaType]:
        yield from self.entities
        yield from self.relationships

    def with_types(self, entities=None, relationships=None, **changes) -> USchemaModel:
        return replace(
            self,
            entities=tuple(self.entities if entities is None else entities),
            relationships=tuple(self.relationships if relationships is None else relationships),
            **changes,
        )


# -- invariants -------------------------------------------------------------

def check_invariants(model: USchemaModel) -> None:
    """Raise :class:`ModelError` listing every violated metamodel invariant."""
    problems: list[str] = []
    entity_names = [e.name for e in model.entities]
    rel_names = [r.name for r in model.relationships]
    for kind, names in (("entity", entity_names), ("relationship type", rel_names)):
        seen = set()
        for n in names:
            if n in seen:
                problems.append(f"duplicate {kind} name {n!r}")
            seen.add(n)
    if model.flavor not in ("full", "union"):
        problems.append(f"unknown flavor {model.flavor!r}")

    entities = {e.name: e for e in model.entities}
    rels = {r.name: r for r in model.relationships}

    for st in model.schema_types():
        is_rel = isinstance(st, RelationshipType)
        where = f"{'relationship' if is_rel else 'entity'} {st.name}"
        if not st.variations:
            problems.append(f"{where} has no variations")
        ids = sorted(v.id for v in st.variations)
        if ids != list(range(1, len(ids) + 1)):
            problems.append(f"{where} variation ids {ids} are not contiguous from 1")
        key_sets = set()
        for v in st.variations:
            problems.extend(_check_variation(model, st, v, entities, rels, is_rel))
            for k in v.keys():
                key_sets.add(k.attributes)
        if len(key_sets) > 1:
            problems.append(f"{where} variations disagree on key attributes {sorted(key_sets)}")

    for e in model.entities:
        for p in e.parents:
            if p not in entities:
                problems.append(f"entity {e.name} has unknown parent {p!r}")
    if _has_cycle({e.name: [p for p in e.parents if p in entities] for e in model.entities}):
        problems.append("parent hierarchy is cyclic")

    agg_graph: dict[tuple[str, int], list[tuple[str, int]]] = {}
    for e in model.entities:
        for v in e.variations:
            agg_graph[(e.name, v.id)] = [
                tuple(t) for a in v.aggregates() for t in a.aggregates
            ]
    if _has_cycle(agg_graph):
        problems.append("aggregation graph is cyclic")

    if problems:
        raise ModelError("invalid model: " + "; ".join(problems))


def _check_variation(model, st, v, entities, rels, is_rel) -> list[str]:
    where = f"{st.name} v{v.id}"
    out = []
    if v.count < 0:
        out.append(f"{where}: negative count")
    if (v.first_timestamp is not None and v.last_timestamp is not None
            and v.first_timestamp > v.last_timestamp):
        out.append(f"{where}: firstTimestamp after lastTimestamp")
    attr_names = {f.name for f in v.features if isinstance(f, Attribute)}
    structural: set[str] = set()
    logical: set[tuple] = set()
    for f in v.features:
        if f.kind in ("attribute", "aggregate"):
            if f.name in structural:
                out.append(f"{where}: duplicate feature {f.name!r}")
            structural.add(f.name)
        else:
            ident = (f.kind, f.name, getattr(f, "refs_to", None))
            if ident in logical:
                out.append(f"{where}: duplicate {f.kind} {f.name!r}")
            logical.add(ident)
        if getattr(f, "optional", False) and model.flavor != "union":
            out.append(f"{where}: optional feature {f.name!r} in full-variability model")
        if isinstance(f, Attribute):
            _check_type(f.type, where, f.name, out)
        elif isinstance(f, Key):
            for a in f.attributes:
                if a not in attr_names:
                    out.append(f"{where}: key {f.name!r} names missing attribute {a!r}")
        elif isinstance(f, Reference):
            if f.refs_to not in entities:
                out.append(f"{where}: reference {f.name!r} to unknown entity {f.refs_to!r}")
            for a in f.attributes:
                if a not in attr_names:
                    out.append(f"{where}: reference {f.name!r} names missing attribute {a!r}")
            _check_bounds(f, where, out)
            if f.featured_by is not None:
                r = rels.get(f.featured_by.type_name)
                if r is None or f.featured_by.variation not in {x.id for x in r.variations}:
                    out.append(f"{where}: reference {f.name!r} featured by unknown "
                               f"variation {tuple(f.featured_by)}")
        elif isinstance(f, Aggregate):
            if is_rel:
                out.append(f"{where}: relationship types cannot hold aggregates")
            if not f.aggregates:
                out.append(f"{where}: aggregate {f.name!r} has no targets")
            for t in f.aggregates:
                e = entities.get(t.type_name)
                if e is None or t.variation not in {x.id for x in e.variations}:
                    out.append(f"{where}: aggregate {f.name!r} targets unknown variation {tuple(t)}")
            _check_bounds(f, where, out)
    return out


def _check_bounds(f, where, out) -> None:
    if f.lower_bound not in (0, 1):
        out.append(f"{where}: {f.name!r} lowerBound must be 0 or 1")
    if f.upper_bound not in (1, UNBOUNDED):
        out.append(f"{where}: {f.name!r} upperBound must be 1 or UNBOUNDED")


def _check_type(t, where, name, out) -> None:
    if isinstance(t, TupleOf):
        if not t.elements:
            out.append(f"{where}: attribute {name!r} has an empty tuple type")
        for e in t.elements:
            _check_type(e, where, name, out)
    elif isinstance(t, (ListOf, SetOf)):
        _check_type(t.element, where, name, out)
    elif isinstance(t, MapOf):
        _check_type(t.key, where, name, out)
        _check_type(t.value, where, name, out)
    elif not isinstance(t, (Primitive, NullType)):
        out.append(f"{where}: attribute {name!r} has invalid type {t!r}")


def _has_cycle(graph: dict) -> bool:
    WHITE, GREY, BLACK = 0, 1, 2
    color = {n: WHITE for n in graph}
    for start in graph:
        if color[start] != WHITE:
            continue
        stack = [(start, iter(graph[start]))]
        color[start] = GREY
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = BLACK
                stack.pop()
            elif color.get(nxt, BLACK) == GREY:
                return True
            elif color.get(nxt) == WHITE:
                color[nxt] = GREY
                stack.append((nxt, iter(graph[nxt])))
    return False
