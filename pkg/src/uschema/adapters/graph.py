"""Labeled property graph dumps: ``nodes.jsonl`` plus ``edges.jsonl``."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from ..errors import ParseError


@dataclass
class Node:
    id: object
    labels: tuple[str, ...]
    props: dict

    @property
    def entity(self) -> str:
        return entity_name(self.labels)


@dataclass
class Edge:
    type: str
    source: object
    target: object
    props: dict


@dataclass
class GraphDump:
    nodes: dict = field(default_factory=dict)  # id -> Node, in file order
    edges: list[Edge] = field(default_factory=list)


def entity_name(labels) -> str:
    """Single label as is; several labels sorted and concatenated."""
    return "".join(sorted(labels))


def _check_props(props, source, lineno):
    if not isinstance(props, dict):
        raise ParseError("props must be an object", source=source, line=lineno)
    for k, v in props.items():
        if isinstance(v, dict):
            raise ParseError(f"property {k!r} holds a nested object", source=source, line=lineno)
        if isinstance(v, list) and any(isinstance(x, (dict, list)) for x in v):
            raise ParseError(f"property {k!r} must be an array of scalars",
                             source=source, line=lineno)


def _lines(path: Path) -> Iterator[tuple[int, dict]]:
    with path.open(encoding="utf-8") as fh:
        for lineno, text in enumerate(fh, start=1):
            if not text.strip():
                continue
            try:
                obj = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ParseError(f"malformed JSON ({exc.msg})", source=str(path), line=lineno,
                                 column=exc.colno) from None
            if not isinstance(obj, dict):
                raise ParseError("each line must hold a JSON object", source=str(path), line=lineno)
            yield lineno, obj


def _key(v):
    # ids 1 and "1" stay distinct; bools are not valid ids
    if isinstance(v, bool) or not isinstance(v, (str, int, float)):
        return None
    return (type(v).__name__ if not isinstance(v, float) else "int", v)


def read_graph(directory) -> GraphDump:
    d = Path(directory)
    nodes_path, edges_path = d / "nodes.jsonl", d / "edges.jsonl"
    if not nodes_path.is_file():
        raise ParseError("missing nodes.jsonl", source=str(d))
    dump = GraphDump()
    for lineno, obj in _lines(nodes_path):
        src = str(nodes_path)
        key = _key(obj.get("id"))
        if key is None:
            raise ParseError("node needs a scalar id", source=src, line=lineno)
        labels = obj.get("labels")
        if (not isinstance(labels, list) or not labels
                or not all(isinstance(x, str) and x for x in labels)):
            raise ParseError("node needs a non-empty list of labels", source=src, line=lineno)
        props = obj.get("props", {})
        _check_props(props, src, lineno)
        if key in dump.nodes:
            raise ParseError(f"duplicate node id {obj['id']!r}", source=src, line=lineno)
        dump.nodes[key] = Node(obj["id"], tuple(sorted(set(labels))), props)
    if edges_path.is_file():
        for lineno, obj in _lines(edges_path):
            src = str(edges_path)
            etype = obj.get("type")
            if not isinstance(etype, str) or not etype:
                raise ParseError("edge needs a type", source=src, line=lineno)
            for end in ("from", "to"):
                k = _key(obj.get(end))
                if k is None or k not in dump.nodes:
                    raise ParseError(f"edge endpoint {end}={obj.get(end)!r} is not a known node",
                                     source=src, line=lineno)
            props = obj.get("props", {})
            _check_props(props, src, lineno)
            dump.edges.append(Edge(etype, _key(obj["from"]), _key(obj["to"]), props))
    return dump
