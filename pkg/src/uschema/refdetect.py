"""Reference detection: name heuristics confirmed by key-membership ratios.

Key sets and candidate-path value counts are collected in the same pass that
maps records to raw schemas, then decisions are taken once everything has
been merged. A decision is made per (root entity, path) so every variation
holding that path is annotated the same way.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable

from .rawschema import ArrayNode, ObjectNode, RefToken, TypedScalar, VariationSchema

ELEMENT = "[]"  # path step for array elements

_SUFFIXES = ("_refs", "_ids", "_ref", "_id", "id")


@dataclass(frozen=True)
class RefConfig:
    threshold: float = 0.95
    min_samples: int = 1
    max_keys: int = 10_000_000
    enabled: bool = True

    def __post_init__(self):
        if not 0 < self.threshold <= 1:
            raise ValueError("threshold must be in (0, 1]")
        if self.min_samples < 1 or self.max_keys < 1:
            raise ValueError("min_samples and max_keys must be positive")


def normalize_key(value) -> str | None:
    """Text form used to match key values against reference values."""
    if isinstance(value, bool) or value is None:
        return None
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return str(int(value)) if value.is_integer() else repr(value)
    if isinstance(value, str):
        return value
    return None


@dataclass
class KeyIndex:
    keys: dict[str, set[str]] = field(default_factory=dict)
    totals: dict[str, int] = field(default_factory=dict)
    overflow: set[str] = field(default_factory=set)
    cap: int = 10_000_000

    def add(self, entity: str, value) -> None:
        self.totals[entity] = self.totals.get(entity, 0) + 1
        k = normalize_key(value)
        if k is None:
            return
        s = self.keys.setdefault(entity, set())
        if entity in self.overflow:
            return
        if len(s) >= self.cap and k not in s:
            self.overflow.add(entity)
            return
        s.add(k)

    def merge(self, other: "KeyIndex") -> "KeyIndex":
        out = KeyIndex({k: set(v) for k, v in self.keys.items()}, dict(self.totals),
                       set(self.overflow) | other.overflow, min(self.cap, other.cap))
        for e, vals in other.keys.items():
            s = out.keys.setdefault(e, set())
            s |= vals
            if len(s) > out.cap:
                out.overflow.add(e)
        for e, n in other.totals.items():
            out.totals[e] = out.totals.get(e, 0) + n
        return out

    def contains(self, entity: str, value: str) -> bool:
        return value in self.keys.get(entity, ())


def build_key_index(pairs: Iterable[tuple[str, object]], cap: int = 10_000_000) -> KeyIndex:
    idx = KeyIndex(cap=cap)
    for entity, key in pairs:
        idx.add(entity, key)
    return idx


def _singular(s: str) -> str:
    if s.endswith("s") and not s.endswith(("ss", "us")) and len(s) > 1:
        return s[:-1]
    return s


def _stem(prop: str) -> str:
    s = prop.lower()
    for suf in _SUFFIXES:
        if s.endswith(suf) and len(s) > len(suf):
            s = s[: -len(suf)]
            break
    return _singular(s)


def _entity_forms(entity: str) -> dict[str, int]:
    """Match forms of an entity name; a form derived by dropping ``_ref`` ranks lower."""
    low = entity.lower()
    forms = {}
    if low.endswith("_ref") and len(low) > 4:
        forms[low[:-4]] = 1
    forms.update({f: 0 for f in (low, _singular(low)) if f})
    return forms


def candidate_target(prop: str, entity_names: Iterable[str]) -> str | None:
    """Entity whose name matches ``prop`` after suffix stripping and singularization."""
    stem = _stem(prop)
    if not stem:
        return None
    best = None
    for e in entity_names:
        for form, derived in _entity_forms(e).items():
            if stem == form or stem.endswith(form) or stem.startswith(form):
                rank = (-len(form), derived, e)
                if best is None or rank < best:
                    best = rank
    return None if best is None else best[2]


class CandidateCache:
    def __init__(self, entity_names: Iterable[str]):
        self.names = sorted(set(entity_names))
        self._memo: dict[str, str | None] = {}

    def __call__(self, prop: str) -> str | None:
        if prop not in self._memo:
            self._memo[prop] = candidate_target(prop, self.names)
        return self._memo[prop]


@dataclass
class ValueSamples:
    """Non-null scalar values seen at reference-eligible paths, per (entity, path)."""

    values: dict[tuple[str, tuple[str, ...]], Counter] = field(default_factory=dict)
    targets: dict[tuple[str, tuple[str, ...]], str] = field(default_factory=dict)

    def collect(self, entity: str, record: dict, candidates: CandidateCache) -> None:
        self._walk(entity, record, (), None, candidates)

    def _walk(self, entity, value, path, prop, candidates):
        if isinstance(value, dict):
            for k, v in value.items():
                self._walk(entity, v, path + (k,), k, candidates)
        elif isinstance(value, list):
            for v in value:
                if not isinstance(v, list):
                    self._walk(entity, v, path + (ELEMENT,), prop, candidates)
        elif prop is not None and prop != "_id":
            k = normalize_key(value)
            if k is None:
                return
            target = candidates(prop)
            if target is None:
                return
            key = (entity, path)
            c = self.values.get(key)
            if c is None:
                c = self.values[key] = Counter()
                self.targets[key] = target
            c[k] += 1

    def merge(self, other: "ValueSamples") -> "ValueSamples":
        out = ValueSamples({k: Counter(v) for k, v in self.values.items()}, dict(self.targets))
        for k, c in other.values.items():
            if k in out.values:
                out.values[k].update(c)
            else:
                out.values[k] = Counter(c)
                out.targets[k] = other.targets[k]
        return out


def decide(index: KeyIndex, samples: ValueSamples, cfg: RefConfig) -> dict:
    """Accepted (entity, path) -> target entity."""
    if not cfg.enabled:
        return {}
    out = {}
    for key, counter in samples.values.items():
        target = samples.targets[key]
        if target not in index.totals:
            continue
        if target in index.overflow:
            out[key] = target
            continue
        total = sum(counter.values())
        if total < cfg.min_samples:
            continue
        keys = index.keys.get(target, set())
        hits = sum(n for v, n in counter.items() if v in keys)
        if hits / total >= cfg.threshold:
            out[key] = target
    return out


def annotate_shape(shape, entity: str, decisions: dict, path: tuple = ()):
    if isinstance(shape, ObjectNode):
        return ObjectNode(tuple(
            (k, annotate_shape(v, entity, decisions, path + (k,))) for k, v in shape.fields
        ))
    if isinstance(shape, ArrayNode):
        return ArrayNode(tuple(
            annotate_shape(e, entity, decisions, path + (ELEMENT,)) for e in shape.elements
        ))
    if isinstance(shape, TypedScalar) and shape.kind != "boolean":
        target = decisions.get((entity, path))
        if target is not None:
            return RefToken(target, shape.kind)
    return shape


def annotate_references(variations: list[VariationSchema], index: KeyIndex, cfg: RefConfig,
                        samples: ValueSamples) -> list[VariationSchema]:
    """Upgrade accepted scalar leaves to RefTokens, merging any shapes that coincide."""
    decisions = decide(index, samples, cfg)
    if not decisions:
        return list(variations)
    merged: dict[tuple, VariationSchema] = {}
    for v in variations:
        shape = annotate_shape(v.shape, v.name, decisions)
        key = (v.kind, v.name, shape)
        prev = merged.get(key)
        if prev is None:
            merged[key] = replace(v, shape=shape)
        else:
            prev.count += v.count
            prev.first_timestamp = _opt(min, prev.first_timestamp, v.first_timestamp)
            prev.last_timestamp = _opt(max, prev.last_timestamp, v.last_timestamp)
            prev.first_seen = min(prev.first_seen, v.first_seen)
    return sorted(merged.values(), key=lambda v: (v.kind, v.name, v.first_seen))


def _opt(fn, a, b):
    if a is None:
        return b
    return a if b is None else fn(a, b)
