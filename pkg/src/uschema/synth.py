"""Dataset synthesis from a model, in any of the five dump formats.

Every variation is realized by exactly ``count * scale`` objects. Values come
from seeded ``random.Random`` streams, one per (schema type, variation, field),
so the output is byte-identical for a given model, paradigm and seed.
"""

from __future__ import annotations

import hashlib
import json
import random
import string
from collections import Counter
from dataclasses import replace
from pathlib import Path

from .adapters.columnar import encode_row
from .adapters.ddl import parse_ddl
from .adapters.graph import entity_name
from .adapters.keyvalue import flatten_record
from .builders.relational import build_relational
from .errors import SynthError
from .model.canonical import compare
from .model.types import (
    UNBOUNDED,
    Aggregate,
    Attribute,
    Key,
    ListOf,
    NullType,
    Primitive,
    Reference,
    TupleOf,
    USchemaModel,
    check_invariants,
)
from .rawschema import TS_FIELD
from .reverse import (
    reverse_columnar,
    reverse_document,
    reverse_graph,
    reverse_keyvalue,
    reverse_relational,
)

AGGREGATE_PARADIGMS = ("document", "keyvalue", "columnar")
ALNUM = string.ascii_letters + string.digits
# generated numbers stay clear of generated ids so they never look like references
NUMBER_RANGE = (1_000_000, 9_999_999)
_NAME_OK = set(string.ascii_letters + string.digits + "_")

_REVERSERS = {
    "document": reverse_document,
    "keyvalue": reverse_keyvalue,
    "columnar": reverse_columnar,
    "graph": reverse_graph,
}


def _stream(seed: int, *parts) -> random.Random:
    text = "\x1f".join(str(p) for p in (seed,) + parts)
    return random.Random(int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big"))


class _Streams:
    def __init__(self, seed: int):
        self.seed = seed
        self.cache: dict[tuple, random.Random] = {}

    def __call__(self, *parts) -> random.Random:
        r = self.cache.get(parts)
        if r is None:
            r = self.cache[parts] = _stream(self.seed, *parts)
        return r


# -- counts -------------------------------------------------------------------

def apply_counts(model: USchemaModel, counts: dict | None = None, scale: int = 1) -> USchemaModel:
    """Replace variation counts from ``counts`` (``{type: [c1, c2..]}`` or
    ``{type: {"1": c1}}``), then multiply every count by ``scale``."""
    if scale < 1:
        raise SynthError("scale must be a positive integer")
    counts = counts or {}
    known = {st.name for st in model.schema_types()}
    for name in counts:
        if name not in known:
            raise SynthError(f"counts override names unknown schema type {name!r}")

    def fix(st):
        override = counts.get(st.name)
        vs = []
        for v in st.variations:
            c = v.count
            if isinstance(override, list):
                if len(override) != len(st.variations):
                    raise SynthError(f"counts for {st.name} need {len(st.variations)} entries")
                c = override[v.id - 1]
            elif isinstance(override, dict):
                c = override.get(str(v.id), override.get(v.id, c))
            elif override is not None:
                raise SynthError(f"counts for {st.name} must be a list or an object")
            if not isinstance(c, int) or isinstance(c, bool) or c < 0:
                raise SynthError(f"invalid count {c!r} for {st.name} v{v.id}")
            vs.append(replace(v, count=c * scale))
        return replace(st, variations=tuple(vs))

    return model.with_types([fix(e) for e in model.entities], [fix(r) for r in model.relationships])


# -- values -------------------------------------------------------------------

def _value(t, rng: random.Random):
    if isinstance(t, Primitive):
        if t.name == "string":
            return "".join(rng.choices(ALNUM, k=8))
        if t.name == "number":
            return rng.randint(*NUMBER_RANGE)
        if t.name == "boolean":
            return rng.random() < 0.5
        if t.name == "json":
            return {"v": rng.randint(*NUMBER_RANGE)}
        raise SynthError(f"cannot generate values of type {t.name}")
    if isinstance(t, NullType):
        return None
    if isinstance(t, ListOf):
        if isinstance(t.element, NullType):
            return [None]
        return [_value(t.element, rng) for _ in range(rng.randint(1, 3))]
    if isinstance(t, TupleOf):
        return [_value(e, rng) for e in t.elements]
    raise SynthError(f"cannot generate values of type {t!r}")


def _type_problems(t, where: str, *, graph: bool, depth: int = 0) -> list[str]:
    if isinstance(t, Primitive):
        if t.name in ("string", "number", "boolean"):
            return []
        if t.name == "json" and depth >= 2 and not graph:
            return []
        return [f"{where}: type {t.name} has no representation"]
    if isinstance(t, NullType):
        return []
    if isinstance(t, (ListOf, TupleOf)):
        if graph and depth >= 1:
            return [f"{where}: nested collections are not allowed in graph properties"]
        elems = [t.element] if isinstance(t, ListOf) else list(t.elements)
        out = []
        for e in elems:
            out.extend(_type_problems(e, where, graph=graph, depth=depth + 1))
        return out
    return [f"{where}: collection type {type(t).__name__} has no representation"]


# -- expressibility -----------------------------------------------------------

def expressibility_problems(model: USchemaModel, paradigm: str) -> list[str]:
    """Constructs of ``model`` that ``paradigm`` cannot hold natively."""
    if model.flavor != "full":
        return ["union-schema models have no per-variation shapes to realize"]
    if paradigm in AGGREGATE_PARADIGMS:
        return _aggregate_problems(model, paradigm)
    if paradigm == "graph":
        return _graph_problems(model)
    if paradigm == "relational":
        return _relational_problems(model)
    raise SynthError(f"unknown paradigm {paradigm!r}")


def _aggregate_problems(model: USchemaModel, paradigm: str) -> list[str]:
    out = []
    for r in model.relationships:
        out.append(f"RelationshipType {r.name} (use the _REF reverse mapping)")
    aggregated = set()
    for e in model.entities:
        for v in e.variations:
            for ag in v.aggregates():
                aggregated.update(t.type_name for t in ag.aggregates)
    for e in model.entities:
        if e.root and e.name in aggregated:
            out.append(f"root entity {e.name} is also aggregated")
        if not e.root and e.name not in aggregated:
            out.append(f"embedded entity {e.name} is never aggregated")
        if e.parents:
            out.append(f"entity {e.name} has parents")
        for v in e.variations:
            where = f"{e.name} v{v.id}"
            if v.count == 0:
                out.append(f"{where}: zero-count variation cannot be witnessed")
            if not e.root and (v.first_timestamp is not None or v.last_timestamp is not None):
                out.append(f"{where}: embedded objects carry no timestamps")
            if (v.first_timestamp is None) != (v.last_timestamp is None):
                out.append(f"{where}: only one of the timestamps is set")
            out.extend(_variation_problems(model, e, v, paradigm, where))
    return out


def _variation_problems(model, e, v, paradigm, where) -> list[str]:
    out = []
    keys = v.keys()
    attrs = {a.name: a for a in v.attributes()}
    payload = [f for f in v.features if not isinstance(f, Key) and f.name != "_id"]
    if e.root:
        if paradigm == "document":
            ok = (len(keys) == 1 and keys[0].name == "_id" and keys[0].attributes == ("_id",)
                  and "_id" in attrs and attrs["_id"].is_key
                  and attrs["_id"].type in (Primitive("number"), Primitive("string")))
            if not ok:
                out.append(f"{where}: document roots need Key _id linked to an _id attribute")
        else:
            if not (len(keys) == 1 and keys[0].name == "_id" and keys[0].attributes == ()):
                out.append(f"{where}: {paradigm} roots need an unlinked Key _id")
            if "_id" in attrs:
                out.append(f"{where}: {paradigm} objects keep _id in the key, not as an attribute")
    elif keys:
        out.append(f"{where}: embedded objects have no keys")
    if paradigm != "document" and not payload:
        out.append(f"{where}: objects without fields cannot be stored in {paradigm} form")
    ref_attrs = set()
    for f in v.features:
        if f.name == TS_FIELD:
            out.append(f"{where}: {TS_FIELD} is reserved for timestamps")
        if paradigm == "keyvalue" and not set(f.name) <= _NAME_OK:
            out.append(f"{where}: {f.name!r} cannot appear in a flattened key")
        if isinstance(f, Attribute):
            if f.is_key and f.name != "_id":
                out.append(f"{where}: key attribute {f.name} is not _id")
            out.extend(_type_problems(f.type, f"{where}.{f.name}", graph=False))
        elif isinstance(f, Reference):
            ref_attrs.add(f.name)
            target_ok = model.has_entity(f.refs_to) and model.entity(f.refs_to).root
            if not target_ok:
                out.append(f"{where}: reference {f.name} targets non-root {f.refs_to}")
            a = attrs.get(f.name)
            scalar = (Primitive("number"), Primitive("string"))
            if f.attributes != (f.name,) or a is None:
                out.append(f"{where}: reference {f.name} needs a same-named companion attribute")
            elif f.upper_bound == 1 and a.type not in scalar:
                out.append(f"{where}: reference {f.name} must hold a scalar key")
            elif f.upper_bound == UNBOUNDED and not (isinstance(a.type, ListOf)
                                                     and a.type.element in scalar):
                out.append(f"{where}: reference {f.name} must hold a list of keys")
            if f.lower_bound != 1 or f.featured_by is not None or f.opposite is not None:
                out.append(f"{where}: reference {f.name} has features documents cannot express")
        elif isinstance(f, Aggregate):
            if f.lower_bound != 1:
                out.append(f"{where}: aggregate {f.name} must have lowerBound 1")
            if f.upper_bound == 1 and len(f.aggregates) != 1:
                out.append(f"{where}: single-valued aggregate {f.name} needs one target")
            for t in f.aggregates:
                if model.entity(t.type_name).root:
                    out.append(f"{where}: aggregate {f.name} targets root entity {t.type_name}")
    return out


def _graph_problems(model: USchemaModel) -> list[str]:
    out = []
    referenced = set()
    parents = {p for e in model.entities for p in e.parents}
    for e in model.entities:
        if e.parents and e.name != entity_name(e.parents):
            out.append(f"entity {e.name} is not named after its labels {list(e.parents)}")
        skip = _parent_only(e, parents)
        for v in e.variations:
            where = f"{e.name} v{v.id}"
            if v.count == 0 and not skip:
                out.append(f"{where}: zero-count variation cannot be witnessed")
            if (v.first_timestamp is None) != (v.last_timestamp is None):
                out.append(f"{where}: only one of the timestamps is set")
            for f in v.features:
                if isinstance(f, Key):
                    out.append(f"{where}: Key {f.name} (use the _keys reverse mapping)")
                elif isinstance(f, Aggregate):
                    out.append(f"{where}: Aggregate {f.name} (use the AGGR_ reverse mapping)")
                elif isinstance(f, Attribute):
                    if f.name == TS_FIELD:
                        out.append(f"{where}: {TS_FIELD} is reserved for timestamps")
                    out.extend(_type_problems(f.type, f"{where}.{f.name}", graph=True))
                elif isinstance(f, Reference):
                    if f.attributes:
                        out.append(f"{where}: reference {f.name} holds attributes")
                    if f.featured_by is None or f.featured_by.type_name != f.name:
                        out.append(f"{where}: reference {f.name} needs its own relationship type")
                    else:
                        referenced.add(f.name)
                    if f.lower_bound != 1 or f.opposite is not None:
                        out.append(f"{where}: reference {f.name} has unsupported bounds")
    bounds: dict[tuple, set] = {}
    for e in model.entities:
        for v in e.variations:
            for f in v.references():
                bounds.setdefault((e.name, f.name, f.refs_to), set()).add(f.upper_bound)
    for (ename, rname, dest), ubs in sorted(bounds.items()):
        if len(ubs) > 1:
            out.append(f"{ename}: {rname} edges to {dest} mix single and unbounded cardinality")
    for r in model.relationships:
        if r.name not in referenced:
            out.append(f"relationship type {r.name} is used by no reference")
        for v in r.variations:
            where = f"{r.name} v{v.id}"
            if v.count == 0:
                out.append(f"{where}: zero-count variation cannot be witnessed")
            for f in v.features:
                if not isinstance(f, Attribute):
                    out.append(f"{where}: relationship types hold only attributes in graphs")
                else:
                    out.extend(_type_problems(f.type, f"{where}.{f.name}", graph=True))
    return out


def _parent_only(e, parents: set[str]) -> bool:
    return e.name in parents and all(v.count == 0 and not v.features for v in e.variations)


def _relational_problems(model: USchemaModel) -> list[str]:
    try:
        ddl = reverse_relational(model, warnings=[])
        back = build_relational(parse_ddl(ddl), model.name, warnings=[])
    except Exception as exc:  # any failure means the DDL cannot carry this model
        return [f"relational rendering failed: {exc}"]
    diff = compare(model, back)
    return [str(d) for d in diff.entries]


# -- aggregate-oriented generation ------------------------------------------

class _AggregateGenerator:
    def __init__(self, model: USchemaModel, paradigm: str, seed: int, ref_sizes):
        self.model = model
        self.paradigm = paradigm
        self.rng = _Streams(seed)
        self.ref_sizes = ref_sizes
        self.ids: dict[str, list] = {}
        self.alloc: dict[tuple, list[int]] = {}
        self.produced: Counter = Counter()

    def key_of(self, entity: str, i: int):
        e = self.model.entity(entity)
        key_attr = next((a for a in e.variations[0].attributes() if a.name == "_id"), None)
        if self.paradigm == "keyvalue":
            return str(i)
        if key_attr is not None and key_attr.type == Primitive("string"):
            return str(i)
        return i

    def plan(self) -> None:
        for e in self.model.entities:
            if e.root:
                n = sum(v.count for v in e.variations)
                self.ids[e.name] = [self.key_of(e.name, i) for i in range(1, n + 1)]
        slots: dict[tuple[str, int], list] = {}
        for e in self.model.entities:
            for v in e.variations:
                for ag in v.aggregates():
                    for t in ag.aggregates:
                        slots.setdefault(tuple(t), []).append(
                            ((e.name, v.id, ag.name), v.count, ag.upper_bound == UNBOUNDED))
        for e in self.model.entities:
            if e.root:
                continue
            for v in e.variations:
                self._allocate((e.name, v.id), v.count, slots.get((e.name, v.id), []))

    def _allocate(self, target, count: int, slots: list) -> None:
        required = sum(n for _, n, _ in slots)
        name = f"{target[0]} v{target[1]}"
        if count < required:
            raise SynthError(f"{name}: count {count} is below the {required} objects that "
                             f"embed it")
        array_cells = [(s, i) for s, n, is_array in slots if is_array for i in range(n)]
        extra = count - required
        if extra and not array_cells:
            raise SynthError(f"{name}: count {count} exceeds the {required} single-valued slots "
                             f"that embed it")
        for s, n, _ in slots:
            self.alloc[(s, target)] = [1] * n
        if extra:
            rng = self.rng("alloc", *target)
            for k in rng.choices(range(len(array_cells)), k=extra):
                s, i = array_cells[k]
                self.alloc[(s, target)][i] += 1

    def records(self) -> list[tuple[str, dict]]:
        self.plan()
        out = []
        for e in self.model.entities:
            if not e.root:
                continue
            idx = 0
            for v in e.variations:
                for j in range(v.count):
                    rec = {"_id": self.ids[e.name][idx]}
                    rec.update(self.object(e.name, v, j, root=True))
                    if v.first_timestamp is not None:
                        rec[TS_FIELD] = _interpolate(v.first_timestamp, v.last_timestamp, j,
                                                     v.count, f"{e.name} v{v.id}")
                    out.append((e.name, rec))
                    idx += 1
        return out

    def object(self, entity: str, v, instance: int, root: bool) -> dict:
        rec: dict = {}
        refs = {f.name: f for f in v.references()}
        for f in v.features:
            if isinstance(f, Attribute):
                if root and f.name == "_id":
                    continue
                rng = self.rng(entity, v.id, f.name)
                ref = refs.get(f.name)
                rec[f.name] = self.ref_value(ref, f, rng) if ref else _value(f.type, rng)
            elif isinstance(f, Aggregate):
                rec[f.name] = self.embedded(entity, v, f, instance)
        return rec

    def ref_value(self, ref: Reference, attr: Attribute, rng):
        ids = self.ids.get(ref.refs_to)
        if not ids:
            raise SynthError(f"reference {ref.name} targets {ref.refs_to}, which has no objects")
        cast = str if attr.type == Primitive("string") or (
            isinstance(attr.type, ListOf) and attr.type.element == Primitive("string")) else int
        if ref.upper_bound == 1:
            return cast(rng.choice(ids))
        lo, hi = self.ref_sizes
        return [cast(x) for x in rng.choices(ids, k=rng.randint(lo, hi))]

    def embedded(self, entity: str, v, ag: Aggregate, instance: int):
        slot = (entity, v.id, ag.name)
        objs = []
        for t in ag.aggregates:
            tv = self.model.entity(t.type_name).variation(t.variation)
            for _ in range(self.alloc[(slot, tuple(t))][instance]):
                k = self.produced[tuple(t)]
                self.produced[tuple(t)] += 1
                objs.append(self.object(t.type_name, tv, k, root=False))
        if ag.upper_bound == 1:
            return objs[0]
        if len(ag.aggregates) > 1:
            self.rng("order", entity, v.id, ag.name).shuffle(objs)
        return objs


def _interpolate(first: int, last: int, j: int, n: int, where: str) -> int:
    if n == 1:
        if first != last:
            raise SynthError(f"{where}: one object cannot carry two different timestamps")
        return first
    return first + (last - first) * j // (n - 1)


# -- graph generation -----------------------------------------------------------

class _GraphGenerator:
    def __init__(self, model: USchemaModel, seed: int):
        self.model = model
        self.rng = _Streams(seed)
        self.nodes: list[dict] = []
        self.by_entity: dict[str, list[int]] = {}
        self.by_variation: dict[tuple[str, int], list[int]] = {}

    def run(self):
        parents = {p for e in self.model.entities for p in e.parents}
        next_id = 1
        for e in self.model.entities:
            if _parent_only(e, parents):
                continue
            labels = sorted(e.parents) if e.parents else [e.name]
            for v in e.variations:
                ids = []
                for j in range(v.count):
                    props = {}
                    for a in v.attributes():
                        props[a.name] = _value(a.type, self.rng(e.name, v.id, a.name))
                    if v.first_timestamp is not None:
                        props[TS_FIELD] = _interpolate(v.first_timestamp, v.last_timestamp, j,
                                                       v.count, f"{e.name} v{v.id}")
                    self.nodes.append({"id": next_id, "labels": labels, "props": props})
                    ids.append(next_id)
                    next_id += 1
                self.by_variation[(e.name, v.id)] = ids
                self.by_entity.setdefault(e.name, []).extend(ids)
        edges = []
        for r in self.model.relationships:
            edges.extend(self.edges_for(r))
        return self.nodes, edges

    def edges_for(self, r):
        slots = []  # (entity, variation, reference)
        for e in self.model.entities:
            for v in e.variations:
                for f in v.references():
                    if f.name == r.name and self.by_variation.get((e.name, v.id)):
                        slots.append((e.name, v, f))
        total = sum(v.count for v in r.variations)
        base = sum(v.count for _, v, _ in slots)
        extra = total - base
        rng = self.rng("edges", r.name)
        if extra < 0:
            raise SynthError(f"{r.name}: {total} edges cannot cover {base} origin nodes")
        groups: dict[tuple, list[int]] = {}
        cells = []  # (slot index, node position) of unbounded slots
        for si, (ename, v, f) in enumerate(slots):
            if f.upper_bound == UNBOUNDED:
                groups.setdefault((ename, f.refs_to), []).append(si)
                cells.extend((si, j) for j in range(v.count))
        if extra < len(groups):
            raise SynthError(f"{r.name}: {total} edges leave some unbounded reference "
                             f"without a node of out-degree 2")
        degree = [[1] * v.count for _, v, _ in slots]
        for key in sorted(groups):
            opts = [(si, j) for si in groups[key] for j in range(slots[si][1].count)]
            si, j = rng.choice(opts)
            degree[si][j] += 1
        left = extra - len(groups)
        if left:
            for k in rng.choices(range(len(cells)), k=left):
                si, j = cells[k]
                degree[si][j] += 1

        variations = self.assign_variations(r, slots, [sum(d) for d in degree])
        out = []
        for si, (ename, v, f) in enumerate(slots):
            dests = self.by_entity.get(f.refs_to)
            if not dests:
                raise SynthError(f"{r.name}: destination {f.refs_to} has no nodes")
            vids = variations[si]
            rng.shuffle(vids)
            k = 0
            for j, src in enumerate(self.by_variation[(ename, v.id)]):
                for _ in range(degree[si][j]):
                    out.append([vids[k], src, rng.choice(dests)])
                    k += 1
        seen: Counter = Counter()
        edges = []
        for vid, src, dst in out:
            rv = r.variation(vid)
            props = {a.name: _value(a.type, self.rng(r.name, vid, a.name)) for a in rv.attributes()}
            if rv.first_timestamp is not None:
                props[TS_FIELD] = _interpolate(rv.first_timestamp, rv.last_timestamp, seen[vid],
                                               rv.count, f"{r.name} v{vid}")
            seen[vid] += 1
            edges.append({"type": r.name, "from": src, "to": dst, "props": props})
        return edges

    @staticmethod
    def assign_variations(r, slots, sizes) -> list[list[int]]:
        """Edge variation ids per slot; each slot's featured variation stays the most frequent."""
        need = {v.id: v.count for v in r.variations}
        assign = []
        for (_, _, f), n in zip(slots, sizes):
            assign.append(Counter({f.featured_by.variation: n}))
        supply = Counter()
        for (_, _, f), n in zip(slots, sizes):
            supply[f.featured_by.variation] += n
        for j in sorted(need):
            while supply[j] < need[j]:
                moved = False
                for si, (_, _, f) in enumerate(slots):
                    fv = f.featured_by.variation
                    if fv == j or supply[fv] <= need[fv]:
                        continue
                    a = assign[si]
                    after_f, after_j = a[fv] - 1, a[j] + 1
                    if after_f > after_j or (after_f == after_j and fv < j):
                        a[fv] -= 1
                        a[j] += 1
                        supply[fv] -= 1
                        supply[j] += 1
                        moved = True
                        break
                if not moved:
                    raise SynthError(f"{r.name}: cannot spread edges over its variations while "
                                     f"keeping every featured variation dominant")
        for vid, n in need.items():
            if supply[vid] != n:
                raise SynthError(f"{r.name} v{vid}: edge counts do not add up")
        out = []
        for a in assign:
            ids = []
            for vid in sorted(a):
                ids.extend([vid] * a[vid])
            out.append(ids)
        return out


# -- writers ------------------------------------------------------------------

def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def write_document(out_dir, records) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: dict[str, list[str]] = {}
    for entity, rec in records:
        files.setdefault(entity, []).append(_dump(rec))
    for entity, lines in files.items():
        (out / f"{entity}.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_keyvalue(out_dir, records) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = []
    for entity, rec in records:
        for key, value in flatten_record(entity, rec["_id"], rec):
            lines.append(_dump([key, value]))
    (out / "data.kvl").write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def write_columnar(out_dir, records) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: dict[str, list[str]] = {}
    for entity, rec in records:
        files.setdefault(entity, []).append(_dump(encode_row(entity, rec)))
    for entity, lines in files.items():
        (out / f"{entity}.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_graph(out_dir, nodes, edges) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "nodes.jsonl").write_text("".join(_dump(n) + "\n" for n in nodes), encoding="utf-8")
    (out / "edges.jsonl").write_text("".join(_dump(e) + "\n" for e in edges), encoding="utf-8")


_WRITERS = {"document": write_document, "keyvalue": write_keyvalue, "columnar": write_columnar}


# -- entry points ---------------------------------------------------------------

def prepare_model(model: USchemaModel, paradigm: str, apply_reverse: bool = False) -> USchemaModel:
    """Model as it will be realized, or SynthError listing what the paradigm cannot hold."""
    check_invariants(model)
    if apply_reverse and paradigm in _REVERSERS:
        model = _REVERSERS[paradigm](model)
    elif apply_reverse and paradigm == "relational" and _relational_problems(model):
        ddl = reverse_relational(model, warnings=[])
        model = build_relational(parse_ddl(ddl), model.name, warnings=[])
    problems = expressibility_problems(model, paradigm)
    if problems:
        hint = "" if apply_reverse else " (try --apply-reverse-mapping)"
        raise SynthError(f"model is not expressible as {paradigm}{hint}: " + "; ".join(problems))
    return model


def synth_dataset(model: USchemaModel, paradigm: str, out_dir, scale: int = 1, seed: int = 0,
                  counts: dict | None = None, apply_reverse: bool = False,
                  ref_sizes: tuple[int, int] = (2, 5)) -> dict:
    if ref_sizes[0] < 1 or ref_sizes[1] < ref_sizes[0]:
        raise SynthError("reference array sizes must satisfy 1 <= low <= high")
    model = apply_counts(model, counts, scale)
    model = prepare_model(model, paradigm, apply_reverse)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    objects = 0
    if paradigm in AGGREGATE_PARADIGMS:
        gen = _AggregateGenerator(model, paradigm, seed, ref_sizes)
        records = gen.records()
        _WRITERS[paradigm](out, records)
        objects = len(records) + sum(gen.produced.values())
    elif paradigm == "graph":
        nodes, edges = _GraphGenerator(model, seed).run()
        write_graph(out, nodes, edges)
        objects = len(nodes) + len(edges)
    else:
        (out / "schema.sql").write_text(reverse_relational(model), encoding="utf-8")
    manifest = {
        "paradigm": paradigm,
        "seed": seed,
        "scale": scale,
        "perVariationCounts": {
            st.name: {str(v.id): v.count for v in st.variations} for st in model.schema_types()
        },
        "totals": {st.name: sum(v.count for v in st.variations) for st in model.schema_types()},
        "objects": objects,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return manifest


def generate_scale_family(model: USchemaModel, factors, seed: int, out_dir,
                          paradigm: str = "document", counts_for=None) -> dict:
    """One dataset per factor under ``out_dir/f<factor>``.

    ``counts_for(factor)`` may return a counts override for that factor; by
    default every count is multiplied by the factor.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for f in factors:
        sub = out / f"f{f}"
        if counts_for is not None:
            m = synth_dataset(model, paradigm, sub, 1, seed, counts_for(f))
        else:
            m = synth_dataset(model, paradigm, sub, f, seed)
        rows.append({"factor": f, "dir": sub.name, "objects": m["objects"],
                     "records": sum(m["totals"][e.name] for e in model.entities if e.root)})
    manifest = {"paradigm": paradigm, "seed": seed, "factors": rows}
    (out / "family.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return manifest
