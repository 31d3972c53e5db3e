"""Canonical normal form, structural comparison and key-link stripping."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace

from ..errors import ModelError
from .types import (
    FEATURE_ORDER,
    Aggregate,
    Attribute,
    Feature,
    Key,
    ListOf,
    MapOf,
    NullType,
    Primitive,
    Reference,
    ReferenceLocator,
    SetOf,
    TupleOf,
    USchemaModel,
    VariationRef,
    type_label,
)


def encode_type(t) -> dict:
    if isinstance(t, Primitive):
        return {"kind": "primitive", "name": t.name}
    if isinstance(t, NullType):
        return {"kind": "null"}
    if isinstance(t, ListOf):
        return {"kind": "list", "element": encode_type(t.element)}
    if isinstance(t, SetOf):
        return {"kind": "set", "element": encode_type(t.element)}
    if isinstance(t, TupleOf):
        return {"kind": "tuple", "elements": [encode_type(e) for e in t.elements]}
    if isinstance(t, MapOf):
        return {"kind": "map", "key": encode_type(t.key), "value": encode_type(t.value)}
    raise TypeError(f"not a data type: {t!r}")


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


class _Digester:
    """Memoized variation digests; aggregate targets are folded in by recursion."""

    def __init__(self, model: USchemaModel):
        self.types = {st.name: st for st in model.schema_types()}
        self.memo: dict[tuple[str, int], str] = {}
        self.active: set[tuple[str, int]] = set()

    def digest(self, type_name: str, vid: int) -> str:
        key = (type_name, vid)
        if key in self.memo:
            return self.memo[key]
        if key in self.active:
            raise ModelError(f"aggregation cycle through {type_name} v{vid}")
        st = self.types.get(type_name)
        if st is None:
            raise ModelError(f"unknown schema type {type_name!r}")
        self.active.add(key)
        try:
            v = st.variation(vid)
            descs = sorted(_dumps(self.descriptor(f)) for f in v.features)
        finally:
            self.active.discard(key)
        h = hashlib.sha256("\n".join(descs).encode("utf-8")).hexdigest()
        self.memo[key] = h
        return h

    def descriptor(self, f: Feature) -> list:
        if isinstance(f, Attribute):
            return ["attribute", f.name, encode_type(f.type), f.optional, f.is_key]
        if isinstance(f, Key):
            return ["key", f.name, list(f.attributes)]
        if isinstance(f, Reference):
            fb = None
            if f.featured_by is not None:
                fb = [f.featured_by.type_name, self.digest(*f.featured_by)]
            opp = None
            if f.opposite is not None:
                # the opposite side may point back here, so only its names count
                opp = [f.opposite.entity, f.opposite.reference]
            return ["reference", f.name, f.refs_to, list(f.attributes), f.lower_bound,
                    f.upper_bound, f.optional, opp, fb]
        if isinstance(f, Aggregate):
            targets = sorted([t.type_name, self.digest(*t)] for t in f.aggregates)
            return ["aggregate", f.name, targets, f.lower_bound, f.upper_bound, f.optional]
        raise TypeError(f"not a feature: {f!r}")


def variation_digests(model: USchemaModel) -> dict[tuple[str, int], str]:
    """Digest of every variation, keyed by (schema type name, variation id)."""
    d = _Digester(model)
    for st in model.schema_types():
        for v in st.variations:
            d.digest(st.name, v.id)
    return dict(d.memo)


def canonicalize(model: USchemaModel) -> USchemaModel:
    d = _Digester(model)
    id_map: dict[tuple[str, int], int] = {}
    ordered: dict[str, list] = {}
    for st in model.schema_types():
        ranked = sorted(
            st.variations,
            key=lambda v: (d.digest(st.name, v.id), v.count,
                           _ts_key(v.first_timestamp), _ts_key(v.last_timestamp), v.id),
        )
        for new_id, v in enumerate(ranked, start=1):
            id_map[(st.name, v.id)] = new_id
        ordered[st.name] = ranked

    def remap(vr: VariationRef) -> VariationRef:
        return VariationRef(vr.type_name, id_map.get(tuple(vr), vr.variation))

    def fix(f: Feature) -> Feature:
        if isinstance(f, Aggregate):
            targets = sorted({remap(t) for t in f.aggregates})
            return replace(f, aggregates=tuple(targets))
        if isinstance(f, Reference):
            changes = {}
            if f.featured_by is not None:
                changes["featured_by"] = remap(f.featured_by)
            if f.opposite is not None:
                o = f.opposite
                changes["opposite"] = ReferenceLocator(
                    o.entity, id_map.get((o.entity, o.variation), o.variation), o.reference)
            return replace(f, **changes) if changes else f
        return f

    def rebuild(st):
        vs = []
        for new_id, v in enumerate(ordered[st.name], start=1):
            feats = sorted((fix(f) for f in v.features), key=_feature_sort_key)
            vs.append(replace(v, id=new_id, features=tuple(feats)))
        return vs

    entities = sorted(
        (replace(e, variations=tuple(rebuild(e)), parents=tuple(sorted(e.parents)))
         for e in model.entities),
        key=lambda e: e.name,
    )
    rels = sorted(
        (replace(r, variations=tuple(rebuild(r))) for r in model.relationships),
        key=lambda r: r.name,
    )
    return model.with_types(entities, rels)


def _ts_key(ts):
    return (ts is None, ts or 0)


def _feature_sort_key(f: Feature):
    return (FEATURE_ORDER[f.kind], f.name, _dumps(_plain_descriptor(f)))


def _plain_descriptor(f: Feature) -> list:
    if isinstance(f, Attribute):
        return [encode_type(f.type), f.optional, f.is_key]
    if isinstance(f, Key):
        return list(f.attributes)
    if isinstance(f, Reference):
        return [f.refs_to, list(f.attributes), f.lower_bound, f.upper_bound, f.optional,
                list(f.featured_by) if f.featured_by else None]
    return [sorted(list(t) for t in f.aggregates), f.lower_bound, f.upper_bound, f.optional]


# -- comparison -------------------------------------------------------------

@dataclass(frozen=True)
class DiffEntry:
    op: str  # added | removed | changed
    path: str
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.op:8} {self.path}" + (f": {self.detail}" if self.detail else "")


@dataclass
class DiffReport:
    entries: list[DiffEntry] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.entries

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def render(self) -> str:
        return "\n".join(str(e) for e in self.entries)

    def to_json(self) -> list[dict]:
        return [{"op": e.op, "path": e.path, "detail": e.detail} for e in self.entries]


def strip_key_links(model: USchemaModel) -> USchemaModel:
    """Drop attributes that back a Key and empty every Key's attribute list.

    Documents link ``_id`` to a stored attribute while key-value and columnar
    stores keep the key outside the value; this erases that difference.
    """
    def strip(v):
        linked = {a for k in v.keys() for a in k.attributes}
        feats = []
        for f in v.features:
            if isinstance(f, Attribute) and (f.name in linked or f.is_key):
                continue
            if isinstance(f, Key):
                f = replace(f, attributes=())
            feats.append(f)
        return replace(v, features=tuple(feats))

    return model.with_types(
        [replace(e, variations=tuple(strip(v) for v in e.variations)) for e in model.entities],
        [replace(r, variations=tuple(strip(v) for v in r.variations)) for r in model.relationships],
    )


def compare(a: USchemaModel, b: USchemaModel, ignore_counts: bool = False,
            ignore_key_links: bool = False) -> DiffReport:
    """Structural diff of two models; the model name and paradigm tag are not compared."""
    if ignore_key_links:
        a, b = strip_key_links(a), strip_key_links(b)
    ca, cb = canonicalize(a), canonicalize(b)
    da, db = variation_digests(ca), variation_digests(cb)
    report = DiffReport()
    out = report.entries
    if ca.flavor != cb.flavor:
        out.append(DiffEntry("changed", "flavor", f"{ca.flavor} -> {cb.flavor}"))
    for kind, xs, ys in (("entities", ca.entities, cb.entities),
                         ("relationships", ca.relationships, cb.relationships)):
        xi = {x.name: x for x in xs}
        yi = {y.name: y for y in ys}
        for name in sorted(xi.keys() | yi.keys()):
            path = f"{kind}/{name}"
            if name not in yi:
                out.append(DiffEntry("removed", path))
                continue
            if name not in xi:
                out.append(DiffEntry("added", path))
                continue
            x, y = xi[name], yi[name]
            if kind == "entities":
                if x.root != y.root:
                    out.append(DiffEntry("changed", path + "/root", f"{x.root} -> {y.root}"))
                if x.parents != y.parents:
                    out.append(DiffEntry("changed", path + "/parents",
                                         f"{list(x.parents)} -> {list(y.parents)}"))
            _compare_variations(path, x, y, da, db, ignore_counts, out)
    return report


def _compare_variations(path, x, y, da, db, ignore_counts, out):
    by_digest_y = {}
    for v in y.variations:
        by_digest_y.setdefault(db[(y.name, v.id)], []).append(v)
    unmatched_x = []
    for v in x.variations:
        bucket = by_digest_y.get(da[(x.name, v.id)])
        if bucket:
            w = bucket.pop(0)
            if not ignore_counts:
                vp = f"{path}/variations[{v.id}]"
                if v.count != w.count:
                    out.append(DiffEntry("changed", vp + "/count", f"{v.count} -> {w.count}"))
                if v.first_timestamp != w.first_timestamp:
                    out.append(DiffEntry("changed", vp + "/firstTimestamp",
                                         f"{v.first_timestamp} -> {w.first_timestamp}"))
                if v.last_timestamp != w.last_timestamp:
                    out.append(DiffEntry("changed", vp + "/lastTimestamp",
                                         f"{v.last_timestamp} -> {w.last_timestamp}"))
        else:
            unmatched_x.append(v)
    unmatched_y = [w for bucket in by_digest_y.values() for w in bucket]
    unmatched_y.sort(key=lambda w: w.id)
    # pair leftovers in canonical order so single-feature edits read as such
    for v, w in zip(unmatched_x, unmatched_y):
        vp = f"{path}/variations[{v.id}]"
        xs = {_feature_text(f): f for f in v.features}
        ys = {_feature_text(f): f for f in w.features}
        for t in sorted(xs.keys() - ys.keys()):
            out.append(DiffEntry("removed", f"{vp}/features/{xs[t].name}", t))
        for t in sorted(ys.keys() - xs.keys()):
            out.append(DiffEntry("added", f"{vp}/features/{ys[t].name}", t))
        if xs.keys() == ys.keys():
            out.append(DiffEntry("changed", vp, "aggregated or featuring variation differs"))
        elif not ignore_counts and v.count != w.count:
            out.append(DiffEntry("changed", vp + "/count", f"{v.count} -> {w.count}"))
    for v in unmatched_x[len(unmatched_y):]:
        out.append(DiffEntry("removed", f"{path}/variations[{v.id}]", _variation_text(v)))
    for w in unmatched_y[len(unmatched_x):]:
        out.append(DiffEntry("added", f"{path}/variations[{w.id}]", _variation_text(w)))


def _feature_text(f: Feature) -> str:
    opt = "?" if getattr(f, "optional", False) else ""
    if isinstance(f, Attribute):
        return f"attribute {f.name}{opt}: {type_label(f.type)}" + (" [key]" if f.is_key else "")
    if isinstance(f, Key):
        return f"key {f.name}({', '.join(f.attributes)})"
    if isinstance(f, Reference):
        ub = "*" if f.upper_bound == -1 else str(f.upper_bound)
        fb = f" featuredBy {f.featured_by.type_name}" if f.featured_by else ""
        return (f"reference {f.name}{opt} -> {f.refs_to} [{f.lower_bound}..{ub}]"
                f"({', '.join(f.attributes)}){fb}")
    ub = "*" if f.upper_bound == -1 else str(f.upper_bound)
    targets = ", ".join(sorted({t.type_name for t in f.aggregates}))
    return f"aggregate {f.name}{opt} -> {targets} [{f.lower_bound}..{ub}]"


def _variation_text(v) -> str:
    return f"count={v.count} {{" + "; ".join(_feature_text(f) for f in v.features) + "}"
