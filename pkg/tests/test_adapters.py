from __future__ import annotations

import json

import pytest

from uschema import fixtures
from uschema.adapters import (
    FlatKey,
    Segment,
    decode_row,
    encode_row,
    flatten_record,
    parse_ddl,
    parse_flat_key,
    read_document,
    read_graph,
    reconstruct_kv_objects,
)
from uschema.adapters.keyvalue import read_keyvalue
from uschema.errors import ParseError


class TestKeyValue:
    def test_parse_flat_key(self):
        fk = parse_flat_key("User:42:watchedMovies[1].movie_id")
        assert fk == FlatKey("User", "42", (Segment("watchedMovies", (1,)), Segment("movie_id")))
        assert str(fk) == "User:42:watchedMovies[1].movie_id"

    def test_nested_indices(self):
        fk = parse_flat_key("A:x:m[0][2]")
        assert fk.path == (Segment("m", (0, 2)),)

    @pytest.mark.parametrize("key, column", [
        ("User", 5), ("User:", 6), ("User::name", 6), ("User:1:", 8),
        ("User:1:a..b", 10), ("User:1:a[x]", 9), ("1User:1:a", 1),
    ])
    def test_malformed_keys_report_column(self, key, column):
        with pytest.raises(ParseError) as err:
            parse_flat_key(key)
        assert err.value.column == column

    def test_reconstruct(self):
        pairs = [
            ("User:1:name", "Ann"),
            ("User:1:address.city", "Murcia"),
            ("User:1:watched[1].stars", 4),
            ("User:1:watched[0].stars", 5),
            ("User:1:tags[0]", "a"),
            ("Movie:7:title", "M"),
        ]
        out = list(reconstruct_kv_objects(pairs))
        assert out == [
            ("User", {"_id": "1", "name": "Ann", "address": {"city": "Murcia"},
                      "watched": [{"stars": 5}, {"stars": 4}], "tags": ["a"]}),
            ("Movie", {"_id": "7", "title": "M"}),
        ]

    def test_conflicts(self):
        with pytest.raises(ParseError, match="conflicting"):
            list(reconstruct_kv_objects([("A:1:x", 1), ("A:1:x.y", 2)]))
        with pytest.raises(ParseError, match="conflicting"):
            list(reconstruct_kv_objects([("A:1:x", 1), ("A:1:x", 2)]))
        with pytest.raises(ParseError, match="conflicting"):
            list(reconstruct_kv_objects([("A:1:x[0]", 1), ("A:1:x.y", 2)]))

    def test_flatten_is_inverse(self):
        rec = {"_id": "3", "a": {"b": [1, 2]}, "c": [{"d": True}, {"d": None}], "m": [[1], [2, 3]]}
        pairs = flatten_record("E", "3", rec)
        assert ("E:3:m[1][1]", 3) in pairs
        assert list(reconstruct_kv_objects(pairs)) == [("E", rec)]

    def test_read_file_errors(self, tmp_path):
        (tmp_path / "d.kvl").write_text('["A:1:x", 1]\n{"bad": 1}\n')
        with pytest.raises(ParseError) as err:
            list(read_keyvalue(tmp_path))
        assert err.value.line == 2
        (tmp_path / "d.kvl").write_text('["A:1:x", [1]]\n')
        with pytest.raises(ParseError, match="scalar"):
            list(read_keyvalue(tmp_path))


class TestColumnar:
    def test_decode_default_and_families(self):
        row = {"key": 5, "families": {
            "User": {"name": "Ann"},
            "address": {"city": "Murcia", "geo.lat": 1},
            "watched": {"0.stars": 5, "0.movie_id": 2, "1.stars": 3, "1.movie_id": 4},
        }}
        assert decode_row("User", row) == {
            "_id": 5, "name": "Ann", "address": {"city": "Murcia", "geo": {"lat": 1}},
            "watched": [{"stars": 5, "movie_id": 2}, {"stars": 3, "movie_id": 4}],
        }

    def test_default_family_alias(self):
        assert decode_row("T", {"key": 1, "families": {"_default": {"x": 1}}}) == {"_id": 1, "x": 1}
        with pytest.raises(ParseError, match="both"):
            decode_row("T", {"key": 1, "families": {"_default": {}, "T": {}}})

    def test_malformed_rows(self):
        for bad in [[], {"key": 1}, {"families": {}}, {"key": 1, "families": {"x": 3}}]:
            with pytest.raises(ParseError):
                decode_row("T", bad)
        with pytest.raises(ParseError, match="twice"):
            decode_row("T", {"key": 1, "families": {"T": {"a": 1}, "a": {"b": 1}}})

    def test_encode_round_trip(self):
        rec = {"_id": 9, "name": "x", "tags": [1, 2], "address": {"city": "c"},
               "watched": [{"stars": 1}, {"stars": 2}]}
        row = encode_row("User", rec)
        assert row == {"key": 9, "families": {
            "User": {"name": "x", "tags": [1, 2]},
            "address": {"city": "c"},
            "watched": {"0.stars": 1, "1.stars": 2}}}
        assert decode_row("User", row) == rec


class TestDocument:
    def test_read(self, tmp_path):
        (tmp_path / "User.jsonl").write_text('{"_id": 1}\n\n{"_id": 2, "a": [1]}\n')
        assert list(read_document(tmp_path)) == [("User", {"_id": 1}), ("User", {"_id": 2, "a": [1]})]

    def test_errors_have_locations(self, tmp_path):
        (tmp_path / "User.jsonl").write_text('{"_id": 1}\n{"_id": \n')
        with pytest.raises(ParseError) as err:
            list(read_document(tmp_path))
        assert err.value.line == 2 and err.value.column is not None
        (tmp_path / "User.jsonl").write_text('{"x": 1}\n')
        with pytest.raises(ParseError, match="_id"):
            list(read_document(tmp_path))
        (tmp_path / "User.jsonl").write_text('[1]\n')
        with pytest.raises(ParseError, match="object"):
            list(read_document(tmp_path))


def _graph(tmp_path, nodes, edges):
    (tmp_path / "nodes.jsonl").write_text("".join(json.dumps(n) + "\n" for n in nodes))
    (tmp_path / "edges.jsonl").write_text("".join(json.dumps(e) + "\n" for e in edges))
    return tmp_path


class TestGraph:
    def test_read(self, tmp_path):
        d = _graph(tmp_path, [{"id": 1, "labels": ["User", "Person"], "props": {"n": "a"}},
                              {"id": "1", "labels": ["Movie"]}],
                   [{"type": "LIKES", "from": 1, "to": "1", "props": {"w": [1, 2]}}])
        g = read_graph(d)
        assert len(g.nodes) == 2
        node = g.nodes[("int", 1)]
        assert node.labels == ("Person", "User") and node.entity == "PersonUser"
        assert g.edges[0].target == ("str", "1")

    @pytest.mark.parametrize("nodes, edges, message", [
        ([{"id": 1, "labels": []}], [], "labels"),
        ([{"labels": ["A"]}], [], "id"),
        ([{"id": 1, "labels": ["A"]}, {"id": 1, "labels": ["A"]}], [], "duplicate"),
        ([{"id": 1, "labels": ["A"], "props": {"x": {"y": 1}}}], [], "nested"),
        ([{"id": 1, "labels": ["A"]}], [{"type": "R", "from": 1, "to": 2}], "endpoint"),
        ([{"id": 1, "labels": ["A"]}], [{"from": 1, "to": 1}], "type"),
    ])
    def test_errors(self, tmp_path, nodes, edges, message):
        with pytest.raises(ParseError, match=message):
            read_graph(_graph(tmp_path, nodes, edges))

    def test_missing_nodes_file(self, tmp_path):
        with pytest.raises(ParseError, match="nodes.jsonl"):
            read_graph(tmp_path)


class TestDdl:
    def test_running_example(self):
        ddl = parse_ddl(fixtures.RELATIONAL_DDL)
        assert [t.name for t in ddl.tables] == ["Movie", "User", "WatchedMovies", "FavoriteMovies"]
        assert [t.is_relationship for t in ddl.tables] == [False, False, True, True]
        wm = ddl.table("WatchedMovies")
        assert wm.primary_key == ("user_id", "movie_id")
        assert [(f.columns, f.target, f.target_columns) for f in wm.foreign_keys] == [
            (("user_id",), "User", ("id",)), (("movie_id",), "Movie", ("id",))]
        assert ddl.table("Movie").column("id").not_null

    def test_sakila(self):
        ddl = parse_ddl(fixtures.sakila_ddl(), "sakila.sql")
        assert len(ddl.tables) == 16
        assert sum(len(t.columns) for t in ddl.tables) == 90
        assert sum(len(t.foreign_keys) for t in ddl.tables) == 22
        rating = ddl.table("film").column("rating")
        assert rating.sql_type == "ENUM" and rating.args[0] == "G"
        assert ddl.table("film").column("rental_rate").args == (4, 2)

    def test_inline_primary_key_and_options(self):
        ddl = parse_ddl("CREATE TABLE IF NOT EXISTS `t` (a INT PRIMARY KEY, b TEXT NULL);")
        t = ddl.tables[0]
        assert t.primary_key == ("a",) and t.column("a").not_null and not t.column("b").not_null

    @pytest.mark.parametrize("text, message, line", [
        ("CREATE TABLE t (a INT,);", "column name", 1),
        ("CREATE TABLE t (a INT)", "';'", 1),
        ("CREATE TABLE t (a INT);\nCREATE TABLE t (b INT);", "duplicate table", 2),
        ("CREATE TABLE t (\n a INT,\n a INT);", "duplicate column", 3),
        ("CREATE TABLE t (a INT, FOREIGN KEY (a) REFERENCES u (id));", "unknown table", 1),
        ("CREATE TABLE t (a INT, PRIMARY KEY (b));", "primary key column", 1),
        ("CREATE TABLE t (a INT PRIMARY KEY, PRIMARY KEY (a));", "twice", 1),
        ("CREATE TABLE t (a INT) # ;", "unexpected character", 1),
    ])
    def test_errors(self, text, message, line):
        with pytest.raises(ParseError, match=message) as err:
            parse_ddl(text, "x.sql")
        assert err.value.line == line
        assert str(err.value).startswith("x.sql, line")

    def test_circular_foreign_keys_allowed(self):
        ddl = parse_ddl("CREATE TABLE a (id INT, b INT, PRIMARY KEY (id), FOREIGN KEY (b) REFERENCES b (id));"
                        "CREATE TABLE b (id INT, a INT, PRIMARY KEY (id), FOREIGN KEY (a) REFERENCES a (id));")
        assert len(ddl.tables) == 2
