"""Randomized properties: synth/infer round trips and order-independent reduction."""

from __future__ import annotations

import random

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from uschema.model import compare
from uschema.model.types import (
    BOOLEAN,
    NULL,
    NUMBER,
    STRING,
    UNBOUNDED,
    Aggregate,
    Attribute,
    EntityType,
    Key,
    ListOf,
    Reference,
    StructuralVariation,
    USchemaModel,
    VariationRef,
)
from uschema.pipeline import infer_records
from uschema.validate import roundtrip_check

LEAF_TYPES = [STRING, NUMBER, BOOLEAN, NULL, ListOf(STRING), ListOf(NUMBER)]
SETTINGS = dict(deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True)


@st.composite
def document_models(draw):
    n_roots = draw(st.integers(1, 3))
    roots = [f"E{i}" for i in range(n_roots)]
    entities, embedded = [], []
    for name in roots:
        pool = {f"f{j}": draw(st.sampled_from(LEAF_TYPES)) for j in range(draw(st.integers(0, 4)))}
        subsets = draw(st.lists(st.frozensets(st.sampled_from(sorted(pool))) if pool
                                else st.just(frozenset()),
                                min_size=1, max_size=3, unique=True))
        variations = []
        for vid, names in enumerate(subsets, start=1):
            count = draw(st.integers(1, 5))
            feats = [Attribute("_id", NUMBER, is_key=True)]
            feats += [Attribute(n, pool[n]) for n in sorted(names)]
            target = draw(st.sampled_from(roots + [None]))
            if target is not None:
                ref = f"{target.lower()}_{'ids' if vid % 2 else 'id'}"
                ub = UNBOUNDED if vid % 2 else 1
                feats += [Attribute(ref, ListOf(NUMBER) if ub == UNBOUNDED else NUMBER),
                          Reference(ref, target, (ref,), 1, ub)]
            if draw(st.booleans()):
                prop = f"p{len(embedded)}"
                ub = draw(st.sampled_from([1, UNBOUNDED]))
                child = prop.capitalize()
                extra = draw(st.integers(1, 4)) if ub == UNBOUNDED else 0
                attrs = draw(st.lists(st.sampled_from(["x", "y", "z"]), min_size=1, unique=True))
                embedded.append(EntityType(child, (StructuralVariation(1, count + extra, tuple(
                    Attribute(a, draw(st.sampled_from(LEAF_TYPES))) for a in sorted(attrs))),),
                    root=False))
                feats.append(Aggregate(prop, (VariationRef(child, 1),), 1, ub))
            feats.append(Key("_id", ("_id",)))
            variations.append(StructuralVariation(vid, count, tuple(feats)))
        entities.append(EntityType(name, tuple(variations), root=True))
    return USchemaModel("random", tuple(entities + embedded), (), paradigm="document")


@settings(max_examples=100, **SETTINGS)
@given(document_models(), st.integers(0, 2**16))
def test_random_models_round_trip(model, seed):
    report = roundtrip_check(model, "document", seed=seed)
    assert report.passed, report.details


SCALARS = st.one_of(st.integers(-5, 50), st.text("abc", max_size=3), st.booleans(), st.none())


def values(depth=2):
    if depth == 0:
        return SCALARS
    inner = values(depth - 1)
    return st.one_of(SCALARS, st.lists(inner, max_size=3),
                     st.dictionaries(st.sampled_from(["a", "b", "tag"]), inner, max_size=3))


RECORDS = st.lists(
    st.tuples(st.sampled_from(["User", "Movie"]),
              st.fixed_dictionaries({"_id": st.integers(1, 30)},
                                    optional={"name": SCALARS, "movie_id": st.integers(1, 40),
                                              "tags": st.lists(SCALARS, max_size=3),
                                              "info": values(), "_ts": st.integers(0, 99)})),
    max_size=30,
)


def reduce_in_order(records, rng: random.Random):
    shuffled = list(records)
    rng.shuffle(shuffled)
    shards = rng.randint(1, 8)
    order = list(range(shards))
    rng.shuffle(order)
    return infer_records(shuffled, shards=shards, merge_order=order)


@settings(max_examples=200, **SETTINGS)
@given(RECORDS, st.randoms(use_true_random=False))
def test_reduction_is_order_and_shard_independent(records, rng):
    base = infer_records(records)
    other = reduce_in_order(records, rng)
    assert not compare(base, other)
    assert [(e.name, e.total_count) for e in base.entities] == \
        [(e.name, e.total_count) for e in other.entities]
