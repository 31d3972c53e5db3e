from __future__ import annotations

import json

import pytest

from conftest import tiny_model
from uschema import fixtures
from uschema.errors import ModelError, ParseError
from uschema.model import canonicalize, deserialize, export_dot, load_model, save_model, serialize
from uschema.model.serialize import decode_type, model_to_dict
from uschema.model.types import NULL, NUMBER, ListOf, MapOf, SetOf, TupleOf


ALL_MODELS = ["document", "keyvalue", "columnar", "graph", "relational"]


@pytest.mark.parametrize("paradigm", ALL_MODELS)
def test_round_trip_is_byte_identical(paradigm):
    m = canonicalize(fixtures.running_example_model(paradigm))
    data = serialize(m)
    back = deserialize(data)
    assert back == m
    assert serialize(back) == data


def test_document_layout():
    doc = json.loads(serialize(tiny_model()))
    assert list(doc) == ["name", "flavor", "entities", "relationships"]
    v = doc["entities"][0]["variations"][0]
    assert v["id"] == 1 and v["count"] == 3
    assert v["features"][0] == {"kind": "attribute", "name": "_id",
                                "type": {"kind": "primitive", "name": "number"},
                                "optional": False, "isKeyMember": True}
    assert v["features"][1] == {"kind": "key", "name": "_id", "attributeNames": ["_id"]}


def test_graph_reference_layout(graph_model):
    d = model_to_dict(graph_model)
    ref = next(f for f in d["entities"][0]["variations"][0]["features"]
               if f["kind"] == "reference")
    assert ref["isFeaturedBy"] == {"relationship": ref["name"], "variation": 1}
    assert ref["upperBound"] == -1
    assert d["paradigm"] == "graph"


def test_timestamps_serialized():
    from conftest import root, variation
    from uschema.model.types import Attribute, STRING, USchemaModel
    m = USchemaModel("t", (root("A", variation(1, 2, Attribute("x", STRING), first=10, last=20)),), ())
    v = json.loads(serialize(m))["entities"][0]["variations"][0]
    assert (v["firstTimestamp"], v["lastTimestamp"]) == (10, 20)
    assert deserialize(serialize(m)) == m


def test_save_and_load(tmp_path, doc_model):
    p = tmp_path / "m.json"
    save_model(doc_model, p)
    assert load_model(p) == doc_model
    assert p.read_bytes().endswith(b"\n")


@pytest.mark.parametrize("t", [NUMBER, NULL, ListOf(NUMBER), TupleOf((NUMBER, NULL)),
                               SetOf(NUMBER), MapOf(NUMBER, ListOf(NUMBER))])
def test_type_round_trip(t):
    from uschema.model.canonical import encode_type
    assert decode_type(encode_type(t)) == t


def test_malformed_documents():
    with pytest.raises(ParseError):
        deserialize("{not json")
    with pytest.raises(ParseError):
        deserialize(json.dumps({"entities": []}))
    bad = json.loads(serialize(tiny_model()))
    bad["entities"][0]["variations"][0]["features"][0]["type"] = {"kind": "primitive"}
    with pytest.raises(ParseError):
        deserialize(json.dumps(bad))


def test_invalid_model_rejected_on_load():
    doc = json.loads(serialize(tiny_model()))
    doc["entities"].append(doc["entities"][0])
    with pytest.raises(ModelError, match="duplicate"):
        deserialize(json.dumps(doc))


def test_dot_export(doc_model):
    dot = export_dot(doc_model)
    assert dot.startswith('digraph "userprofiles" {')
    assert '"User" -> "Movie"' in dot
    assert 'arrowtail=diamond' in dot
    assert dot.count("<table") == 4
    assert export_dot(doc_model) == dot


def test_dot_featured_relationship(graph_model):
    dot = export_dot(graph_model)
    assert "style=dashed" in dot
    assert '"WATCHED_MOVIES"' in dot
