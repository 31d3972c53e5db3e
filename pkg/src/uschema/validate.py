"""Validation checks: round trip, variation witnessing, count correctness, bench."""

from __future__ import annotations

import json
import tempfile
import time
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .adapters import columnar, document, keyvalue
from .adapters.graph import read_graph
from .errors import USchemaError
from .model.canonical import compare, variation_digests
from .model.types import USchemaModel
from .pipeline import infer
from .synth import prepare_model, synth_dataset

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


@dataclass
class CheckReport:
    check: str
    status: str  # pass | fail | error
    details: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @property
    def exit_code(self) -> int:
        return {"pass": EXIT_PASS, "fail": EXIT_FAIL}.get(self.status, EXIT_ERROR)

    def to_dict(self) -> dict:
        return {"check": self.check, "status": self.status, "details": self.details}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def count_deltas(expected: USchemaModel, actual: USchemaModel) -> list[dict]:
    """Per-variation count differences, pairing variations by structural digest."""
    de, da = variation_digests(expected), variation_digests(actual)
    found: dict[tuple[str, str], int] = Counter()
    for st in actual.schema_types():
        for v in st.variations:
            found[(st.name, da[(st.name, v.id)])] += v.count
    out = []
    for st in expected.schema_types():
        for v in st.variations:
            got = found.get((st.name, de[(st.name, v.id)]), 0)
            if got != v.count:
                out.append({"type": st.name, "variation": v.id, "expected": v.count,
                            "actual": got, "delta": got - v.count})
    return out


def roundtrip_check(model: USchemaModel, paradigm: str, seed: int = 0, workdir=None,
                    apply_reverse: bool = False, threads: int | None = 1) -> CheckReport:
    """synth -> infer -> compare; passes when the diff is empty and counts are exact."""
    expected = prepare_model(model, paradigm, apply_reverse)
    with tempfile.TemporaryDirectory(dir=workdir) as tmp:
        out = Path(tmp) / "data"
        synth_dataset(model, paradigm, out, seed=seed, apply_reverse=apply_reverse)
        inferred = infer(paradigm, out, threads=threads, name=expected.name)
    diff = compare(expected, inferred)
    details = [{"diff": e.op, "path": e.path, "detail": e.detail} for e in diff.entries]
    details += [{"countDelta": d} for d in count_deltas(expected, inferred)]
    return CheckReport("roundtrip", _status(not details), details)


def all_variations_exist(model: USchemaModel, dataset, paradigm: str,
                         threads: int | None = 1) -> CheckReport:
    """Every variation of ``model`` is the shape of at least one stored object.

    Objects are classified by running inference over the dataset, so an object
    witnesses a variation exactly when it would reduce into it. Variations with
    count 0 are placeholders (such as label-only parents) and need no witness,
    except in the relational paradigm where the DDL itself is the witness.
    """
    found = infer(paradigm, dataset, threads=threads, name=model.name)
    have = set()
    dig = variation_digests(found)
    for st in found.schema_types():
        for v in st.variations:
            have.add((st.name, dig[(st.name, v.id)]))
    want = variation_digests(model)
    missing = []
    for st in model.schema_types():
        for v in st.variations:
            if v.count == 0 and paradigm != "relational":
                continue
            if (st.name, want[(st.name, v.id)]) not in have:
                missing.append({"type": st.name, "variation": v.id,
                                "reason": "no object has this shape"})
    return CheckReport("variations", _status(not missing), missing)


def stored_totals(dataset, paradigm: str) -> Counter:
    """Objects per stored schema type, counted straight from the files."""
    totals: Counter = Counter()
    p = Path(dataset)
    if paradigm == "document":
        for ent, _src, _ln, _text in document.iter_lines(p):
            totals[ent] += 1
    elif paradigm == "columnar":
        for ent, _src, _ln, _text in columnar.iter_rows(p):
            totals[ent] += 1
    elif paradigm == "keyvalue":
        for ent, _rec in keyvalue.read_keyvalue(p):
            totals[ent] += 1
    elif paradigm == "graph":
        dump = read_graph(p)
        for node in dump.nodes.values():
            totals[node.entity] += 1
        for e in dump.edges:
            totals[e.type] += 1
    elif paradigm != "relational":
        raise USchemaError(f"unknown paradigm {paradigm!r}")
    return totals


def count_correctness(model: USchemaModel, dataset, paradigm: str,
                      threads: int | None = 1) -> CheckReport:
    """Objects stored per schema type equal the sum of that type's variation counts.

    Root objects, nodes and edges are counted directly from the files; embedded
    objects have no file of their own and are counted through inference.
    """
    stored = stored_totals(dataset, paradigm)
    embedded = [e.name for e in model.entities if not e.root]
    if embedded:
        found = infer(paradigm, dataset, threads=threads, name=model.name)
        for name in embedded:
            if found.has_entity(name):
                stored[name] = found.entity(name).total_count
    problems = []
    names = [st.name for st in model.schema_types()]
    for st in model.schema_types():
        want = sum(v.count for v in st.variations)
        got = stored.get(st.name, 0)
        if got != want:
            problems.append({"type": st.name, "expected": want, "actual": got,
                             "delta": got - want})
    for name in sorted(set(stored) - set(names)):
        problems.append({"type": name, "expected": 0, "actual": stored[name],
                         "delta": stored[name], "reason": "type not in model"})
    return CheckReport("counts", _status(not problems), problems)


def bench_inference(family_dir, threads: int | None = None, repeats: int = 1) -> dict:
    """Time inference over every dataset of a scale family (best of ``repeats``)."""
    root = Path(family_dir)
    manifest = json.loads((root / "family.json").read_text(encoding="utf-8"))
    paradigm = manifest["paradigm"]
    rows = []
    models = []
    for entry in manifest["factors"]:
        best = None
        for _ in range(max(1, repeats)):
            t0 = time.perf_counter()
            m = infer(paradigm, root / entry["dir"], threads=threads, name="bench")
            dt = time.perf_counter() - t0
            best = dt if best is None else min(best, dt)
        models.append(m)
        rows.append({"factor": entry["factor"], "records": entry["records"],
                     "objects": entry["objects"], "seconds": round(best, 6),
                     "throughput": round(entry["records"] / best, 3) if best > 0 else None})
    base = rows[0]["seconds"] if rows else None
    for r in rows:
        r["ratio"] = round(r["seconds"] / base, 4) if base else None
    same = all(not compare(models[0], m, ignore_counts=True) for m in models[1:])
    return {"paradigm": paradigm, "threads": threads, "rows": rows,
            "modelsAgreeUpToCounts": same}


def render_bench(report: dict) -> str:
    head = f"{'factor':>6} {'records':>9} {'objects':>9} {'seconds':>9} {'rec/s':>11} {'ratio':>7}"
    lines = [head, "-" * len(head)]
    for r in report["rows"]:
        lines.append(f"{r['factor']:>6} {r['records']:>9} {r['objects']:>9} "
                     f"{r['seconds']:>9.3f} {r['throughput']:>11.1f} {r['ratio']:>7.2f}")
    return "\n".join(lines)
