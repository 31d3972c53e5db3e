"""Full-variability to union-schema conversion."""

from __future__ import annotations

from dataclasses import replace

from .types import (
    Aggregate,
    Feature,
    Key,
    Reference,
    StructuralVariation,
    USchemaModel,
    VariationRef,
)


def to_union_schema(model: USchemaModel) -> USchemaModel:
    """Collapse every schema type to one variation, flagging partial features optional.

    Features found in every source variation stay mandatory; the rest become
    optional. Same-named features whose definitions disagree are each kept
    under ``name_<k>`` (k counts distinct definitions in variation order).
    """
    entities = [_union_type(e, model) for e in model.entities]
    relationships = [_union_type(r, model) for r in model.relationships]
    return model.with_types(entities, relationships, flavor="union")


def _union_type(st, model):
    variations = sorted(st.variations, key=lambda v: v.id)
    remapped = [[_retarget(f) for f in v.features] for v in variations]

    structural, renames = _merge_group(
        variations, [[f for f in fs if f.kind in ("attribute", "aggregate")] for fs in remapped]
    )
    logical_src = []
    for i, fs in enumerate(remapped):
        names = renames[i]
        logical_src.append([_rename_attrs(f, names) for f in fs if f.kind in ("key", "reference")])
    logical, _ = _merge_group(variations, logical_src)

    firsts = [v.first_timestamp for v in variations if v.first_timestamp is not None]
    lasts = [v.last_timestamp for v in variations if v.last_timestamp is not None]
    union_var = StructuralVariation(
        id=1,
        count=sum(v.count for v in variations),
        features=tuple(structural + logical),
        first_timestamp=min(firsts) if firsts else None,
        last_timestamp=max(lasts) if lasts else None,
    )
    return replace(st, variations=(union_var,))


def _retarget(f: Feature) -> Feature:
    # every type ends up with a single variation, so cross-links point at id 1
    if isinstance(f, Aggregate):
        targets = []
        for t in f.aggregates:
            vr = VariationRef(t.type_name, 1)
            if vr not in targets:
                targets.append(vr)
        return replace(f, aggregates=tuple(targets))
    if isinstance(f, Reference) and f.featured_by is not None:
        return replace(f, featured_by=VariationRef(f.featured_by.type_name, 1))
    return f


def _rename_attrs(f: Feature, names: dict[str, str]) -> Feature:
    if isinstance(f, (Key, Reference)):
        return replace(f, attributes=tuple(names.get(a, a) for a in f.attributes))
    return f


def _merge_group(variations, per_variation: list[list[Feature]]):
    """Merge one name group; return merged features and per-variation rename maps."""
    n = len(variations)
    order: list[str] = []
    defs: dict[str, list[Feature]] = {}
    seen_in: dict[str, dict[Feature, list[int]]] = {}
    src_optional: dict[tuple[str, Feature], bool] = {}
    for i, fs in enumerate(per_variation):
        for f in fs:
            plain = _mandatory(f)
            if f.name not in defs:
                order.append(f.name)
                defs[f.name] = []
                seen_in[f.name] = {}
            if plain not in seen_in[f.name]:
                defs[f.name].append(plain)
                seen_in[f.name][plain] = []
            seen_in[f.name][plain].append(i)
            if getattr(f, "optional", False):
                src_optional[(f.name, plain)] = True

    merged: list[Feature] = []
    renames: list[dict[str, str]] = [{} for _ in range(n)]
    for name in order:
        variants = defs[name]
        if len(variants) == 1:
            plain = variants[0]
            present = seen_in[name][plain]
            optional = len(set(present)) < n or src_optional.get((name, plain), False)
            merged.append(_with_optional(plain, optional))
            continue
        for k, plain in enumerate(variants, start=1):
            new_name = f"{name}_{k}"
            merged.append(_with_optional(replace(plain, name=new_name), True))
            for i in seen_in[name][plain]:
                renames[i][name] = new_name
    return merged, renames


def _mandatory(f: Feature) -> Feature:
    if hasattr(f, "optional") and f.optional:
        return replace(f, optional=False)
    return f


def _with_optional(f: Feature, optional: bool) -> Feature:
    if isinstance(f, Key):
        return f
    return replace(f, optional=optional)
