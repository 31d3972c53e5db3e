from __future__ import annotations

import pytest

from uschema import fixtures
from uschema.adapters import parse_ddl
from uschema.builders.relational import build_relational
from uschema.errors import ModelError
from uschema.model import compare
from uschema.model.types import (
    NUMBER,
    STRING,
    UNBOUNDED,
    Aggregate,
    Attribute,
    EntityType,
    ListOf,
    Reference,
    StructuralVariation,
    USchemaModel,
    VariationRef,
)
from uschema.reverse import (
    reverse_columnar,
    reverse_document,
    reverse_graph,
    reverse_keyvalue,
    reverse_relational,
)


def features(model, entity, vid=1):
    return model.entity(entity).variation(vid).features


def test_watched_movie_ref_entity():
    m = reverse_document(fixtures.watched_relationship_model())
    assert not m.relationships
    ref = m.entity("WatchedMovie_REF")
    assert ref.root
    assert [f.name for f in features(m, "WatchedMovie_REF") if f.kind == "attribute"] == [
        "_id", "stars", "movie_id"]
    user = features(m, "User")
    assert Reference("WatchedMovie_REF_ref", "WatchedMovie_REF", ("WatchedMovie_REF_ref",),
                     1, UNBOUNDED) in user
    assert Attribute("WatchedMovie_REF_ref", ListOf(NUMBER)) in user


def test_watched_movie_ref_carries_destination():
    m = reverse_document(fixtures.watched_relationship_model())
    feats = features(m, "WatchedMovie_REF")
    assert Attribute("stars", NUMBER) in feats
    assert Reference("movie_id", "Movie", ("movie_id",), 1, 1) in feats
    assert m.entity("WatchedMovie_REF").variation(1).count == 30


@pytest.mark.parametrize("fn", [reverse_document, reverse_keyvalue, reverse_columnar])
def test_aggregate_reversers_keep_running_example(fn):
    m = fixtures.aggregate_model()
    out = fn(m)
    assert [e.name for e in out.entities] == [e.name for e in m.entities]
    assert not compare(out, m, ignore_key_links=True)


def test_aggr_relationship_name():
    m = reverse_graph(fixtures.person_address_model())
    assert [r.name for r in m.relationships] == ["AGGR_address_address1"]
    person = features(m, "Person")
    assert Reference("AGGR_address_address1", "Address", (), 1, 1,
                     featured_by=VariationRef("AGGR_address_address1", 1)) in person
    assert m.entity("Address").root


def test_graph_keys_attribute():
    m = reverse_graph(fixtures.person_address_model())
    person = features(m, "Person")
    assert Attribute("_keys", ListOf(STRING)) in person
    assert Attribute("_id", NUMBER) in person
    assert not any(f.kind == "key" for f in person)


def test_graph_rejects_aggregate_cycles():
    a = EntityType("A", (StructuralVariation(1, 1, (Aggregate("b", (VariationRef("B", 1),)),)),))
    b = EntityType("B", (StructuralVariation(1, 1, (Aggregate("a", (VariationRef("A", 1),)),)),),
                   root=False)
    with pytest.raises(ModelError, match="cycl"):
        reverse_graph(USchemaModel("c", (a, b), ()))


def _tables(ddl: str) -> dict:
    return {t.name: [c.name for c in t.columns] for t in parse_ddl(ddl).tables}


def test_inline_one_to_one():
    ddl = reverse_relational(fixtures.person_address_model())
    assert _tables(ddl) == {"Person": ["_id", "name", "street", "city"]}


def test_separate_table():
    warnings: list[str] = []
    ddl = reverse_relational(fixtures.person_address_model(), aggregate_strategy="separate-table",
                             warnings=warnings)
    t = {t.name: t for t in parse_ddl(ddl).tables}
    assert [c.name for c in t["Address"].columns] == ["id", "street", "city", "person_id"]
    assert t["Address"].foreign_keys[0].target == "Person"
    assert not warnings


def test_inline_falls_back_for_arrays():
    warnings: list[str] = []
    ddl = reverse_relational(fixtures.aggregate_model(), warnings=warnings)
    assert warnings == ["aggregate 'watchedMovies' is not one-to-one; stored in a separate table"]
    tables = _tables(ddl)
    assert sorted(tables) == ["Movie", "User_v1", "User_v1_favoriteMovies", "User_v2", "WatchedMovie"]
    assert "postcode" in tables["User_v1"] and "postcode" not in tables["User_v2"]


def test_union_nulls():
    ddl = reverse_relational(fixtures.aggregate_model(), variation_strategy="union-nulls",
                             warnings=[])
    tables = _tables(ddl)
    assert tables["User"] == ["_id", "name", "surname", "email", "street", "city", "number",
                              "postcode"]
    model = build_relational(parse_ddl(ddl), "u")
    assert len(model.entity("User").variations) == 1


def test_relational_round_trip_of_ddl():
    m = fixtures.relational_model()
    again = build_relational(parse_ddl(reverse_relational(m)), m.name)
    assert not compare(again, m)


def test_featured_reference_becomes_relationship_table():
    ddl = reverse_relational(fixtures.watched_relationship_model())
    t = {t.name: t for t in parse_ddl(ddl).tables}
    assert t["WatchedMovie"].is_relationship
    assert [c.name for c in t["WatchedMovie"].columns] == ["stars", "user_id", "movie_id"]


@pytest.mark.parametrize("kw", [{"variation_strategy": "x"}, {"aggregate_strategy": "x"}])
def test_unknown_strategy(kw):
    with pytest.raises(ValueError):
        reverse_relational(fixtures.person_address_model(), **kw)
