from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from uschema import fixtures, load_model, save_model
from uschema.cli import main

FIXTURES = Path(__file__).parent / "fixtures"


def run(*argv) -> int:
    return main([str(a) for a in argv])


def test_infer_then_compare_fixture(tmp_path):
    out = tmp_path / "m.json"
    assert run("infer", "--paradigm", "document", "--input", FIXTURES / "userprofiles",
               "--out", out, "--threads", "1") == 0
    assert run("compare", out, FIXTURES / "expected-document.json") == 0


def test_compare_self(capsys):
    path = FIXTURES / "expected-document.json"
    assert run("compare", path, path) == 0
    assert capsys.readouterr().out == "models are equal\n"


def test_compare_different(tmp_path, capsys):
    other = tmp_path / "o.json"
    save_model(fixtures.aggregate_model("document", users=20, movies=11, per_user=3), other)
    a = FIXTURES / "expected-document.json"
    assert run("compare", a, other) == 1
    assert "Movie" in capsys.readouterr().out
    assert run("compare", a, other, "--ignore-counts") == 0
    capsys.readouterr()
    assert run("compare", a, other, "--json") == 1
    assert json.loads(capsys.readouterr().out)


def test_missing_input(tmp_path, capsys):
    assert run("infer", "--paradigm", "graph", "--input", tmp_path / "missing",
               "--out", tmp_path / "m.json") == 2
    assert "error" in capsys.readouterr().err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        run("infer", "--paradigm", "nosql", "--input", "x", "--out", "y")
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        run("compare", "a", "b", "--bogus")
    assert exc.value.code == 2


def test_union(tmp_path):
    out = tmp_path / "u.json"
    assert run("union", FIXTURES / "expected-document.json", "-o", out) == 0
    m = load_model(out)
    assert m.flavor == "union"
    assert all(len(e.variations) == 1 for e in m.entities)


def test_reverse(tmp_path):
    model = tmp_path / "w.json"
    save_model(fixtures.watched_relationship_model(), model)
    assert run("reverse", "--paradigm", "document", model, "-o", tmp_path / "d.json") == 0
    assert load_model(tmp_path / "d.json").has_entity("WatchedMovie_REF")
    assert run("reverse", "--paradigm", "relational", model, "-o", tmp_path / "s.sql") == 0
    assert "-- @relationship" in (tmp_path / "s.sql").read_text()


def test_synth_and_validate(tmp_path, capsys):
    model = tmp_path / "m.json"
    save_model(fixtures.aggregate_model("keyvalue", users=10, movies=6, per_user=2), model)
    data = tmp_path / "data"
    assert run("synth", model, "--paradigm", "keyvalue", "--seed", "3", "-o", data) == 0
    assert (data / "data.kvl").exists()
    capsys.readouterr()
    for check in ("variations", "counts"):
        assert run("validate", "--check", check, "--paradigm", "keyvalue", "--model", model,
                   "--input", data, "--threads", "1") == 0
        assert json.loads(capsys.readouterr().out)["status"] == "pass"
    assert run("validate", "--check", "roundtrip", "--paradigm", "keyvalue",
               "--model", model, "--threads", "1") == 0


def test_validate_failure_exit_code(tmp_path, capsys):
    model = tmp_path / "m.json"
    save_model(fixtures.aggregate_model(users=10, movies=6, per_user=2), model)
    data = tmp_path / "data"
    run("synth", model, "--paradigm", "document", "-o", data)
    with open(data / "Movie.jsonl", "a") as fh:
        fh.write('{"_id": 100, "title": "t", "genre": "g", "year": 1}\n')
    assert run("validate", "--check", "counts", "--paradigm", "document", "--model", model,
               "--input", data) == 1
    assert run("validate", "--check", "counts", "--paradigm", "document",
               "--model", model) == 2


def test_synth_needs_reverse(tmp_path, capsys):
    model = tmp_path / "m.json"
    save_model(fixtures.aggregate_model(users=10, movies=6), model)
    assert run("synth", model, "--paradigm", "graph", "-o", tmp_path / "g") == 2
    assert "--apply-reverse-mapping" in capsys.readouterr().err
    assert run("synth", model, "--paradigm", "graph", "-o", tmp_path / "g",
               "--apply-reverse-mapping") == 0


def test_synth_counts_file(tmp_path):
    model = tmp_path / "m.json"
    save_model(fixtures.aggregate_model(), model)
    counts = tmp_path / "c.json"
    counts.write_text(json.dumps({"User": [5, 5], "Movie": [4], "Address": [5, 5],
                                  "WatchedMovie": [12]}))
    assert run("synth", model, "--paradigm", "document", "--counts", counts,
               "-o", tmp_path / "d") == 0
    assert (tmp_path / "d" / "Movie.jsonl").read_text().count("\n") == 4
    counts.write_text("[1]")
    assert run("synth", model, "--paradigm", "document", "--counts", counts,
               "-o", tmp_path / "d") == 2


def test_export_dot(capsys):
    assert run("export", "--format", "dot", FIXTURES / "expected-document.json") == 0
    out = capsys.readouterr().out
    assert out.startswith("digraph") and "WatchedMovie" in out


def test_family_and_bench(tmp_path, capsys):
    model = tmp_path / "m.json"
    save_model(fixtures.aggregate_model(users=10, movies=6, per_user=2), model)
    fam = tmp_path / "fam"
    assert run("family", "--model", model, "--factors", "1,2", "-o", fam) == 0
    assert run("bench", "--family", fam, "-o", tmp_path / "b.json", "--threads", "1") == 0
    report = json.loads((tmp_path / "b.json").read_text())
    assert [r["factor"] for r in report["rows"]] == [1, 2]
    assert run("family", "--factors", "3", "-o", fam) == 2


def test_example(tmp_path):
    assert run("example", "--paradigm", "columnar", "--users", "4", "--movies", "2",
               "--per-user", "1", "-o", tmp_path) == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["Movie.jsonl", "User.jsonl"]


def test_threads_do_not_change_output(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    src = FIXTURES / "userprofiles"
    run("infer", "--paradigm", "document", "--input", src, "--out", a, "--threads", "1")
    run("infer", "--paradigm", "document", "--input", src, "--out", b, "--threads", "3")
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "uschema", "--help"], capture_output=True,
                          text=True)
    assert proc.returncode == 0 and "infer" in proc.stdout
