"""End-to-end inference: adapter -> map/reduce -> reference detection -> builder."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import islice
from pathlib import Path
from typing import Iterable

from .adapters import columnar, document, keyvalue
from .adapters.ddl import parse_ddl
from .adapters.graph import read_graph
from .builders.aggregate import AggregateModelBuilder
from .builders.graph import infer_graph
from .builders.relational import build_relational
from .errors import ParseError, USchemaError
from .model.types import USchemaModel
from .model.union import to_union_schema
from .rawschema import ReduceState, map_record, merge_partials
from .refdetect import CandidateCache, KeyIndex, RefConfig, ValueSamples, annotate_references

PARADIGMS = ("document", "keyvalue", "columnar", "graph", "relational")
BATCH = 4096


def default_threads() -> int:
    env = os.environ.get("USCHEMA_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise USchemaError(f"USCHEMA_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise USchemaError("USCHEMA_THREADS must be positive")
        return n
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


@dataclass
class MapResult:
    """Everything one shard contributes; all parts merge associatively."""

    reduce: ReduceState = field(default_factory=ReduceState)
    keys: KeyIndex = field(default_factory=KeyIndex)
    samples: ValueSamples = field(default_factory=ValueSamples)

    def merge(self, other: "MapResult") -> "MapResult":
        return MapResult(merge_partials(self.reduce, other.reduce), self.keys.merge(other.keys),
                         self.samples.merge(other.samples))


def map_records(items: Iterable[tuple[int, str, dict]], entity_names, cap: int) -> MapResult:
    """Map ``(global index, entity, record)`` triples into a partial result."""
    out = MapResult(keys=KeyIndex(cap=cap))
    candidates = CandidateCache(entity_names)
    for index, entity, record in items:
        shape, ts = map_record(record)
        out.reduce.add(entity, "entity", shape, ts, index)
        out.keys.add(entity, record.get("_id"))
        out.samples.collect(entity, record, candidates)
    return out


def _map_lines(args) -> MapResult:
    paradigm, batch, entity_names, cap = args
    if paradigm == "document":
        items = ((i, ent, document.decode_line(src, ln, text)) for i, ent, src, ln, text in batch)
    else:
        items = ((i, ent, columnar.decode_line(ent, src, ln, text))
                 for i, ent, src, ln, text in batch)
    return map_records(items, entity_names, cap)


def _map_record_batch(args) -> MapResult:
    batch, entity_names, cap = args
    return map_records(batch, entity_names, cap)


def _batches(iterable, size):
    it = iter(iterable)
    while True:
        chunk = list(islice(it, size))
        if not chunk:
            return
        yield chunk


def _fold(results: Iterable[MapResult], cap: int) -> MapResult:
    total = MapResult(keys=KeyIndex(cap=cap))
    for r in results:
        total = _absorb(total, r)
    return total


def _absorb(total: MapResult, r: MapResult) -> MapResult:
    # in-place variant of MapResult.merge; avoids copying the running total
    for k, acc in r.reduce.groups.items():
        cur = total.reduce.groups.get(k)
        if cur is None:
            total.reduce.groups[k] = acc
        else:
            cur.absorb(acc)
    total.keys = total.keys.merge(r.keys) if total.keys.keys else r.keys
    total.samples = total.samples.merge(r.samples) if total.samples.values else r.samples
    return total


def _finish(mapped: MapResult, key_style: str, name: str, refs: RefConfig) -> USchemaModel:
    variations = mapped.reduce.results()
    variations = annotate_references(variations, mapped.keys, refs, mapped.samples)
    return AggregateModelBuilder(name, key_style).build(variations)


def infer_records(records: Iterable[tuple[str, dict]], key_style: str = "document",
                  name: str = "db", refs: RefConfig | None = None, shards: int = 1,
                  merge_order: list[int] | None = None) -> USchemaModel:
    """In-memory inference over ``(entity, record)`` pairs, split into ``shards``.

    Shards are contiguous slices reduced independently and combined in
    ``merge_order`` (default: natural order); the result never depends on either.
    """
    refs = refs or RefConfig()
    items = [(i, e, r) for i, (e, r) in enumerate(records)]
    names = sorted({e for _, e, _ in items})
    shards = max(1, shards)
    size = -(-len(items) // shards) if items else 1
    parts = [map_records(items[k * size:(k + 1) * size], names, refs.max_keys)
             for k in range(shards)]
    order = merge_order if merge_order is not None else list(range(shards))
    total = MapResult(keys=KeyIndex(cap=refs.max_keys))
    for k in order:
        total = total.merge(parts[k])
    return _finish(total, key_style, name, refs)


def _run(paradigm: str, jobs, fn, threads: int) -> list[MapResult]:
    if threads <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, jobs))


def infer(paradigm: str, path, refs: RefConfig | None = None, flavor: str = "full",
          threads: int | None = None, name: str | None = None) -> USchemaModel:
    if paradigm not in PARADIGMS:
        raise USchemaError(f"unknown paradigm {paradigm!r}; expected one of {', '.join(PARADIGMS)}")
    if flavor not in ("full", "union"):
        raise USchemaError(f"unknown flavor {flavor!r}")
    refs = refs or RefConfig()
    threads = default_threads() if threads is None else max(1, threads)
    p = Path(path)
    if not p.exists():
        raise ParseError("input path does not exist", source=str(p))
    name = name or (p.stem if p.is_file() else p.resolve().name) or "db"

    if paradigm == "relational":
        sql = p if p.is_file() else _single_sql(p)
        model = build_relational(parse_ddl(sql.read_text(encoding="utf-8"), str(sql)), name)
    elif paradigm == "graph":
        model = infer_graph(read_graph(p), name)
    elif paradigm == "keyvalue":
        records = list(keyvalue.read_keyvalue(p))
        names = sorted({e for e, _ in records})
        indexed = [(i, e, r) for i, (e, r) in enumerate(records)]
        jobs = [(b, names, refs.max_keys) for b in _batches(indexed, BATCH)]
        model = _finish(_fold(_run(paradigm, jobs, _map_record_batch, threads), refs.max_keys),
                        "keyvalue", name, refs)
    else:
        files = document.collection_files(p)
        names = sorted(f.stem for f in files)
        reader = document.iter_lines if paradigm == "document" else columnar.iter_rows
        lines = ((i, ent, src, ln, text) for i, (ent, src, ln, text) in enumerate(reader(p)))
        jobs = ((paradigm, b, names, refs.max_keys) for b in _batches(lines, BATCH))
        if threads <= 1:
            parts = (_map_lines(j) for j in jobs)
            model = _finish(_fold(parts, refs.max_keys), paradigm, name, refs)
        else:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                parts = pool.map(_map_lines, jobs)
                model = _finish(_fold(parts, refs.max_keys), paradigm, name, refs)
    return to_union_schema(model) if flavor == "union" else model


def _single_sql(directory: Path) -> Path:
    files = sorted(directory.glob("*.sql"))
    if len(files) != 1:
        raise ParseError(f"expected exactly one .sql file, found {len(files)}", source=str(directory))
    return files[0]
