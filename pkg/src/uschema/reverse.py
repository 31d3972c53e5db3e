"""Reverse mappings from a model to the schema of one paradigm.

Aggregate-oriented and graph targets produce a model tagged with the target
paradigm; the relational target produces DDL text in the parser's grammar.
"""

from __future__ import annotations

import logging
from dataclasses import replace

from .builders.naming import lower_first
from .errors import ModelError
from .model.canonical import _Digester
from .model.types import (
    NUMBER,
    STRING,
    UNBOUNDED,
    Aggregate,
    Attribute,
    EntityType,
    Key,
    ListOf,
    MapOf,
    NullType,
    Primitive,
    Reference,
    RelationshipType,
    SetOf,
    StructuralVariation,
    TupleOf,
    USchemaModel,
    VariationRef,
    check_invariants,
)
from .model.union import to_union_schema

log = logging.getLogger(__name__)

REF_SUFFIX = "_REF"


# -- type lowering ------------------------------------------------------------

_JSON_SAFE = ("string", "number", "boolean")


def lower_type(t, allow_json: bool = False):
    """Closest type a JSON-based store can hold; used only when a type cannot be kept."""
    if isinstance(t, Primitive):
        if t.name in _JSON_SAFE or (allow_json and t.name == "json"):
            return t
        return STRING
    if isinstance(t, NullType):
        return t
    if isinstance(t, (ListOf, SetOf)):
        return ListOf(lower_type(t.element, True))
    if isinstance(t, TupleOf):
        return TupleOf(tuple(lower_type(e, True) for e in t.elements))
    if isinstance(t, MapOf):
        return STRING
    return t


# -- document / key-value / columnar -----------------------------------------

def _featured_destinations(model: USchemaModel) -> dict[str, str]:
    out: dict[str, str] = {}
    for st in model.schema_types():
        for v in st.variations:
            for f in v.references():
                if f.featured_by is not None:
                    out.setdefault(f.featured_by.type_name, f.refs_to)
    return out


def _root_key_features(feats: list, style: str) -> list:
    """Replace whatever key the variation has by the paradigm's ``_id`` key."""
    id_type = NUMBER
    out = []
    for f in feats:
        if isinstance(f, Key):
            continue
        if isinstance(f, Attribute) and f.name == "_id":
            id_type = f.type if isinstance(f.type, Primitive) else NUMBER
            continue
        if isinstance(f, Attribute) and f.is_key:
            f = replace(f, is_key=False)
        out.append(f)
    if style == "document":
        return [Attribute("_id", id_type, is_key=True)] + out + [Key("_id", ("_id",))]
    return out + [Key("_id", ())]


def _lower_attrs(feats: list) -> list:
    return [replace(f, type=lower_type(f.type)) if isinstance(f, Attribute) else f for f in feats]


def _companion(name: str, ub: int) -> Attribute:
    return Attribute(name, ListOf(NUMBER) if ub == UNBOUNDED else NUMBER)


def _reverse_aggregate(model: USchemaModel, style: str) -> USchemaModel:
    dests = _featured_destinations(model)
    ref_entity = {rt.name: rt.name + REF_SUFFIX for rt in model.relationships}
    taken = {e.name for e in model.entities}
    for name in ref_entity.values():
        if name in taken:
            raise ModelError(f"cannot add entity {name!r}: the name is already used")

    entities = []
    for e in model.entities:
        vs = []
        for v in e.variations:
            feats = _origin_features(list(v.features), ref_entity)
            feats = _lower_attrs(feats)
            if e.root:
                feats = _root_key_features(feats, style)
            else:
                feats = [f for f in feats if not isinstance(f, Key)]
            vs.append(replace(v, features=tuple(feats)))
        entities.append(replace(e, variations=tuple(vs), parents=()))

    for rt in model.relationships:
        dest = dests.get(rt.name)
        vs = []
        for v in rt.variations:
            feats = [f for f in v.features if not isinstance(f, Key)]
            feats = _origin_features(feats, ref_entity)
            if dest is not None and not any(
                    isinstance(f, Reference) and f.refs_to == dest for f in feats):
                link = lower_first(dest) + "_id"
                if not any(f.name == link for f in feats if isinstance(f, Attribute)):
                    feats.append(Attribute(link, NUMBER))
                feats.append(Reference(link, dest, (link,), 1, 1))
            feats = _root_key_features(_lower_attrs(feats), style)
            vs.append(replace(v, features=tuple(feats)))
        entities.append(EntityType(ref_entity[rt.name], tuple(vs), root=True))

    out = replace(model, entities=tuple(entities), relationships=(), paradigm=style)
    check_invariants(out)
    return out


def _origin_features(feats: list, ref_entity: dict[str, str]) -> list:
    """Swap references featured by a relationship type for references to its _REF entity,
    and give attribute-less references a companion attribute."""
    out: list = []
    structural = {f.name for f in feats if isinstance(f, (Attribute, Aggregate))}
    added: set[str] = set()
    for f in feats:
        if not isinstance(f, Reference):
            out.append(f)
            continue
        if f.featured_by is not None and f.featured_by.type_name in ref_entity:
            target = ref_entity[f.featured_by.type_name]
            name = target + "_ref"
            if name in added:
                continue
            added.add(name)
            if name not in structural:
                out.append(_companion(name, f.upper_bound))
            out.append(Reference(name, target, (name,), f.lower_bound, f.upper_bound))
            continue
        if f.attributes:
            out.append(replace(f, featured_by=None, opposite=None))
            continue
        if f.name not in structural and f.name not in added:
            out.append(_companion(f.name, f.upper_bound))
            added.add(f.name)
        out.append(replace(f, attributes=(f.name,), featured_by=None, opposite=None))
    return out


def reverse_document(model: USchemaModel) -> USchemaModel:
    return _reverse_aggregate(model, "document")


def reverse_keyvalue(model: USchemaModel) -> USchemaModel:
    return _reverse_aggregate(model, "keyvalue")


def reverse_columnar(model: USchemaModel) -> USchemaModel:
    return _reverse_aggregate(model, "columnar")


# -- graph --------------------------------------------------------------------

def aggr_name(ag: Aggregate, target: VariationRef) -> str:
    return f"AGGR_{ag.name}_{target.type_name.lower()}{target.variation}"


def _check_acyclic(model: USchemaModel) -> None:
    # digests recurse through aggregates and raise on a cycle
    digester = _Digester(model)
    for st in model.schema_types():
        for v in st.variations:
            digester.digest(st.name, v.id)


def reverse_graph(model: USchemaModel) -> USchemaModel:
    _check_acyclic(model)

    new_rels: dict[str, list[int]] = {}  # name -> [edge count]
    rel_order: list[str] = []

    def bump(name: str, n: int):
        if name not in new_rels:
            new_rels[name] = [0]
            rel_order.append(name)
        new_rels[name][0] += n

    existing = {r.name for r in model.relationships}
    entities = []
    for e in model.entities:
        vs = []
        for v in e.variations:
            feats: list = []
            key_attrs: list[str] = []
            for f in v.features:
                if isinstance(f, Key):
                    key_attrs.extend(a for a in f.attributes if a not in key_attrs)
                    if not f.attributes and f.name not in key_attrs:
                        key_attrs.append(f.name)
                elif isinstance(f, Attribute):
                    feats.append(replace(f, type=_graph_type(f.type), is_key=False))
                elif isinstance(f, Aggregate):
                    for t in f.aggregates:
                        name = aggr_name(f, t)
                        target_count = model.entity(t.type_name).variation(t.variation).count
                        bump(name, target_count)
                        feats.append(Reference(name, t.type_name, (), f.lower_bound, f.upper_bound,
                                               featured_by=VariationRef(name, 1)))
                elif f.featured_by is not None:
                    feats.append(replace(f, attributes=(), opposite=None))
                else:
                    per_node = 2 if f.upper_bound == UNBOUNDED else 1
                    if f.name not in existing:
                        bump(f.name, v.count * per_node)
                    feats.append(replace(f, attributes=(), opposite=None,
                                         featured_by=VariationRef(f.name, 1)))
            if key_attrs:
                feats.insert(0, Attribute("_keys", ListOf(STRING)))
            vs.append(replace(v, features=tuple(feats)))
        entities.append(replace(e, root=True, variations=tuple(vs)))

    rels = []
    for r in model.relationships:
        vs = [replace(v, features=tuple(replace(f, type=_graph_type(f.type), is_key=False)
                                        for f in v.features if isinstance(f, Attribute)))
              for v in r.variations]
        rels.append(replace(r, variations=tuple(vs)))
    for name in rel_order:
        rels.append(RelationshipType(name, (StructuralVariation(1, new_rels[name][0], ()),)))
    out = replace(model, entities=tuple(entities), relationships=tuple(rels), paradigm="graph")
    check_invariants(out)
    return out


def _graph_type(t):
    t = lower_type(t)
    if isinstance(t, (ListOf, TupleOf)):
        elems = [t.element] if isinstance(t, ListOf) else list(t.elements)
        if any(isinstance(x, (ListOf, TupleOf, SetOf, MapOf)) or x == Primitive("json")
               for x in elems):
            return STRING
    return t


# -- relational ---------------------------------------------------------------

_SQL_OUT = {"number": "INT", "string": "VARCHAR(255)", "boolean": "BOOLEAN", "blob": "BLOB",
            "json": "JSON", "timestamp": "TIMESTAMP"}


def sql_type(t) -> str:
    if isinstance(t, Primitive):
        if t.name in _SQL_OUT:
            return _SQL_OUT[t.name]
        return t.name.upper()
    return "JSON"


class _Table:
    def __init__(self, name: str, relationship: bool = False):
        self.name = name
        self.relationship = relationship
        self.columns: list[list] = []  # [name, type, not_null]
        self.pk: tuple[str, ...] = ()
        self.fks: list[tuple[tuple[str, ...], str, tuple[str, ...]]] = []

    def col(self, name: str) -> list | None:
        for c in self.columns:
            if c[0] == name:
                return c
        return None

    def add(self, name: str, typ: str, not_null: bool = False) -> str:
        c = self.col(name)
        if c is not None:
            if c[1] != typ:
                raise ModelError(f"column {self.name}.{name} has conflicting types")
            c[2] = c[2] or not_null
            return name
        self.columns.append([name, typ, not_null])
        return name

    def render(self) -> str:
        lines = []
        for name, typ, nn in self.columns:
            lines.append(f"  {name} {typ}" + (" NOT NULL" if nn else ""))
        if self.pk:
            lines.append(f"  PRIMARY KEY ({', '.join(self.pk)})")
        for cols, target, tcols in self.fks:
            lines.append(f"  FOREIGN KEY ({', '.join(cols)}) REFERENCES {target} "
                         f"({', '.join(tcols)})")
        head = "-- @relationship\n" if self.relationship else ""
        return head + f"CREATE TABLE {self.name} (\n" + ",\n".join(lines) + "\n);\n"


def reverse_relational(model: USchemaModel, variation_strategy: str = "per-table",
                       aggregate_strategy: str = "inline-1to1",
                       warnings: list[str] | None = None) -> str:
    if variation_strategy not in ("per-table", "union-nulls"):
        raise ValueError(f"unknown variation strategy {variation_strategy!r}")
    if aggregate_strategy not in ("inline-1to1", "separate-table"):
        raise ValueError(f"unknown aggregate strategy {aggregate_strategy!r}")
    return _RelationalWriter(model, variation_strategy, aggregate_strategy, warnings).run()


class _RelationalWriter:
    def __init__(self, model, vstrat, astrat, warnings):
        _check_acyclic(model)
        # union-nulls works on the union flavor so aggregate targets see merged columns
        self.model = to_union_schema(model) if vstrat == "union-nulls" else model
        self.vstrat = vstrat
        self.astrat = astrat
        self.warnings = warnings if warnings is not None else []
        self.tables: list[_Table] = []
        self.by_name: dict[str, _Table] = {}
        # entity -> table names holding its rows, and the PK columns of those tables
        self.entity_tables: dict[str, list[str]] = {}
        self.pending_fks: list = []
        # separate-table aggregates wait until their owner's primary key exists
        self.deferred: dict[str, list] = {}

    def warn(self, msg: str) -> None:
        if msg in self.warnings:
            return
        log.warning(msg)
        self.warnings.append(msg)

    def new_table(self, name: str, relationship: bool = False) -> _Table:
        base, k = name, 2
        while name in self.by_name:
            name = f"{base}_{k}"
            k += 1
        t = _Table(name, relationship)
        self.tables.append(t)
        self.by_name[name] = t
        return t

    def variations_of(self, st):
        if len(st.variations) == 1:
            return [(st.name, st.variations[0])]
        return [(f"{st.name}_v{v.id}", v) for v in st.variations]

    def run(self) -> str:
        rel_dests = _featured_destinations(self.model)
        featured_origins: dict[str, list[tuple[str, Reference]]] = {}
        for e in self.model.entities:
            if not e.root:
                continue
            for tname, v in self.variations_of(e):
                t = self.new_table(tname)
                self.entity_tables.setdefault(e.name, []).append(t.name)
                self.fill(t, v, prefix="", owner=e.name)
                for f in v.references():
                    if f.featured_by is not None:
                        featured_origins.setdefault(f.featured_by.type_name, []).append((t.name, f))
        for r in self.model.relationships:
            for tname, v in self.variations_of(r):
                t = self.new_table(tname, relationship=True)
                self.fill(t, v, prefix="", owner=None)
                for origin, f in featured_origins.get(r.name, []):
                    self.link(t, origin, lower_first(origin) + "_id")
                    dest = rel_dests.get(r.name, f.refs_to)
                    self.link_entity(t, dest, lower_first(dest) + "_id")
        for args in self.pending_fks:
            self.resolve_fk(*args)
        return "\n".join(t.render() for t in self.tables)

    # each column added while filling a table keeps the attribute's name
    def fill(self, t: _Table, v: StructuralVariation, prefix: str, owner: str | None) -> None:
        keys = [f for f in v.features if isinstance(f, Key)]
        refs = [f for f in v.features if isinstance(f, Reference)]
        unbounded_attrs = {a for f in refs if f.upper_bound == UNBOUNDED for a in f.attributes}
        colmap: dict[str, str] = {}
        for f in v.features:
            if isinstance(f, Attribute) and f.name not in unbounded_attrs:
                name = colmap[f.name] = self.column_name(t, prefix, f.name)
                t.add(name, sql_type(f.type), f.is_key and not prefix)
            elif isinstance(f, Aggregate):
                self.aggregate(t, f, prefix, owner)
        if not prefix:
            if keys and keys[0].attributes:
                t.pk = tuple(keys[0].attributes)
                for c in t.pk:
                    t.col(c)[2] = True
            elif not t.relationship:
                pk = "id" if t.col("id") is None else f"{t.name}_id"
                t.columns.insert(0, [pk, "INT", True])
                t.pk = (pk,)
            for ag in self.deferred.pop(t.name, []):
                self.separate(t, ag)
        for f in refs:
            if f.featured_by is not None:
                continue
            if f.upper_bound == UNBOUNDED:
                self.join_table(t, f)
                continue
            cols = tuple(colmap.get(a, a) for a in f.attributes)
            if not cols:
                cols = (t.add(self.column_name(t, prefix, f.name), "INT", f.lower_bound == 1),)
            for c in cols:
                if f.lower_bound == 1:
                    t.col(c)[2] = True
            self.pending_fks.append((t, cols, f.refs_to))

    def column_name(self, t: _Table, prefix: str, name: str) -> str:
        if not prefix:
            return name
        return name if t.col(name) is None else f"{prefix}_{name}"

    def aggregate(self, t: _Table, ag: Aggregate, prefix: str, owner: str | None) -> None:
        one_to_one = ag.upper_bound == 1 and len(ag.aggregates) == 1
        if self.astrat == "inline-1to1" and one_to_one:
            target = ag.aggregates[0]
            v = self.model.entity(target.type_name).variation(target.variation)
            self.fill(t, v, prefix=ag.name, owner=owner)
            return
        if self.astrat == "inline-1to1":
            self.warn(f"aggregate {ag.name!r} is not one-to-one; stored in a separate table")
        self.deferred.setdefault(t.name, []).append(ag)

    def separate(self, t: _Table, ag: Aggregate) -> None:
        for target in ag.aggregates:
            ent = self.model.entity(target.type_name)
            v = ent.variation(target.variation)
            name = target.type_name if len(ent.variations) == 1 \
                else f"{target.type_name}_v{target.variation}"
            child = self.by_name.get(name)
            if child is None:
                child = self.new_table(name)
                self.fill(child, v, prefix="", owner=target.type_name)
                self.entity_tables.setdefault(target.type_name, []).append(child.name)
            self.link(child, t.name, lower_first(t.name) + "_id")

    def link(self, child: _Table, parent: str, column: str) -> None:
        p = self.by_name[parent]
        cols = []
        for pk in p.pk:
            c = column if len(p.pk) == 1 else f"{column}_{pk}"
            ptype = p.col(pk)[1]
            child.add(c, ptype, False)
            cols.append(c)
        fk = (tuple(cols), p.name, tuple(p.pk))
        if fk not in child.fks:
            child.fks.append(fk)

    def link_entity(self, t: _Table, entity: str, column: str) -> None:
        tables = self.entity_tables.get(entity, [])
        if len(tables) != 1:
            self.warn(f"entity {entity!r} spans {len(tables)} tables; no foreign key emitted")
            return
        self.link(t, tables[0], column)

    def join_table(self, owner: _Table, f: Reference) -> None:
        jt = self.new_table(f"{owner.name}_{f.name}", relationship=True)
        self.link(jt, owner.name, lower_first(owner.name) + "_id")
        for c in jt.columns:
            c[2] = True
        dest_col = lower_first(f.refs_to) + "_id"
        if jt.col(dest_col) is not None:
            dest_col = f.name + "_id"
        self.pending_fks.append((jt, None, f.refs_to, dest_col))

    def resolve_fk(self, t: _Table, cols, entity: str, dest_col: str | None = None) -> None:
        tables = self.entity_tables.get(entity, [])
        if len(tables) != 1:
            self.warn(f"entity {entity!r} spans {len(tables)} tables; no foreign key emitted "
                      f"from {t.name}")
            if cols is None:
                t.add(dest_col, "INT", True)
            return
        target = self.by_name[tables[0]]
        if cols is None:
            cols = []
            for pk in target.pk:
                c = dest_col if len(target.pk) == 1 else f"{dest_col}_{pk}"
                t.add(c, target.col(pk)[1], True)
                cols.append(c)
            cols = tuple(cols)
        if len(cols) != len(target.pk):
            self.warn(f"reference from {t.name} to {entity} does not match its key; "
                      f"no foreign key emitted")
            return
        t.fks.append((tuple(cols), target.name, target.pk))
