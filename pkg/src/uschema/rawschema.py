"""Map phase (record -> raw schema) and reduce phase (raw schemas -> variation schemas)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Union

TS_FIELD = "_ts"


@dataclass(frozen=True)
class TypedScalar:
    kind: str  # string | number | boolean


@dataclass(frozen=True)
class NullToken:
    pass


@dataclass(frozen=True)
class RefToken:
    target: str
    kind: str  # scalar kind of the stored key value


@dataclass(frozen=True)
class ObjectNode:
    fields: tuple[tuple[str, "RawSchema"], ...]

    def get(self, name: str):
        for k, v in self.fields:
            if k == name:
                return v
        return None

    def names(self) -> list[str]:
        return [k for k, _ in self.fields]


@dataclass(frozen=True)
class ArrayNode:
    elements: tuple["RawSchema", ...]


RawSchema = Union[TypedScalar, NullToken, RefToken, ObjectNode, ArrayNode]

STRING = TypedScalar("string")
NUMBER = TypedScalar("number")
BOOLEAN = TypedScalar("boolean")
NULL = NullToken()


def scalar_kind(value) -> str | None:
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, (int, float)):
        return "number"
    if isinstance(value, str):
        return "string"
    return None


def _shape(value) -> RawSchema:
    if value is None:
        return NULL
    if isinstance(value, bool):
        return BOOLEAN
    if isinstance(value, (int, float)):
        return NUMBER
    if isinstance(value, str):
        return STRING
    if isinstance(value, dict):
        return ObjectNode(tuple((k, _shape(value[k])) for k in sorted(value)))
    if isinstance(value, (list, tuple)):
        return ArrayNode(tuple(_shape(v) for v in value))
    raise TypeError(f"unsupported value type {type(value).__name__}")


def extract_timestamp(record: dict) -> int | None:
    ts = record.get(TS_FIELD)
    if isinstance(ts, (int, float)) and not isinstance(ts, bool):
        return int(ts)
    return None


def raw_schema_of(record: dict) -> ObjectNode:
    """Type skeleton of a root record, with the numeric ``_ts`` field left out."""
    if not isinstance(record, dict):
        raise TypeError("records must be objects at the root")
    strip = extract_timestamp(record) is not None
    return ObjectNode(tuple(
        (k, _shape(record[k])) for k in sorted(record) if not (strip and k == TS_FIELD)
    ))


def map_record(record: dict) -> tuple[ObjectNode, int | None]:
    return raw_schema_of(record), extract_timestamp(record)


# -- reduce -----------------------------------------------------------------

@dataclass
class VariationSchema:
    name: str
    kind: str  # entity | relationship
    shape: Hashable
    count: int
    first_timestamp: int | None = None
    last_timestamp: int | None = None
    first_seen: int = 0


@dataclass
class _Acc:
    count: int
    first_ts: int | None
    last_ts: int | None
    first_seen: int

    def absorb(self, other: "_Acc") -> None:
        self.count += other.count
        self.first_ts = _min(self.first_ts, other.first_ts)
        self.last_ts = _max(self.last_ts, other.last_ts)
        self.first_seen = min(self.first_seen, other.first_seen)


def _min(a, b):
    if a is None:
        return b
    return a if b is None else min(a, b)


def _max(a, b):
    if a is None:
        return b
    return a if b is None else max(a, b)


@dataclass
class ReduceState:
    """Partial reduction: counts and timestamps per (name, kind, shape)."""

    groups: dict = field(default_factory=dict)

    def add(self, name: str, kind: str, shape, ts: int | None = None, index: int = 0) -> None:
        key = (name, kind, shape)
        acc = self.groups.get(key)
        if acc is None:
            self.groups[key] = _Acc(1, ts, ts, index)
        else:
            acc.count += 1
            if ts is not None:
                acc.first_ts = _min(acc.first_ts, ts)
                acc.last_ts = _max(acc.last_ts, ts)
            if index < acc.first_seen:
                acc.first_seen = index

    def results(self) -> list[VariationSchema]:
        out = [
            VariationSchema(name, kind, shape, acc.count, acc.first_ts, acc.last_ts, acc.first_seen)
            for (name, kind, shape), acc in self.groups.items()
        ]
        out.sort(key=lambda v: (v.kind, v.name, v.first_seen))
        return out


def merge_partials(a: ReduceState, b: ReduceState) -> ReduceState:
    """Combine two partial states; commutative and associative, empty state is neutral."""
    out = ReduceState({k: _Acc(v.count, v.first_ts, v.last_ts, v.first_seen)
                       for k, v in a.groups.items()})
    for k, v in b.groups.items():
        acc = out.groups.get(k)
        if acc is None:
            out.groups[k] = _Acc(v.count, v.first_ts, v.last_ts, v.first_seen)
        else:
            acc.absorb(v)
    return out


def reduce_merge(pairs: Iterable[tuple]) -> list[VariationSchema]:
    """Group ``(name, kind, shape[, ts])`` tuples into variation schemas."""
    state = ReduceState()
    for i, item in enumerate(pairs):
        name, kind, shape = item[0], item[1], item[2]
        ts = item[3] if len(item) > 3 else None
        state.add(name, kind, shape, ts, i)
    return state.results()
