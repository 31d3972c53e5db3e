"""Graph builder: node labels become entities, edge labels relationship types."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from ..adapters.graph import GraphDump
from ..model.types import (
    UNBOUNDED,
    Attribute,
    EntityType,
    Reference,
    RelationshipType,
    StructuralVariation,
    USchemaModel,
    VariationRef,
)
from ..rawschema import ReduceState, VariationSchema, map_record
from .aggregate import leaf_type


@dataclass(frozen=True)
class NodeShape:
    props: tuple  # sorted (name, data type); array lengths are already folded away
    out: tuple[tuple[str, str], ...]  # sorted (relationship type, destination entity)


@dataclass
class GraphStats:
    max_out: dict = field(default_factory=dict)  # (type, origin entity, dest entity) -> degree
    destinations: dict = field(default_factory=dict)  # type -> sorted dest entities
    # (origin entity, NodeShape, type, dest entity) -> Counter(edge props shape)
    cooccurrence: dict = field(default_factory=dict)


def typed_props(props: dict) -> tuple[tuple, int | None]:
    shape, ts = map_record(props)
    return tuple((name, leaf_type(node)) for name, node in shape.fields), ts


def graph_variations(dump: GraphDump):
    """Node and edge variation schemas plus the statistics the builder needs."""
    nodes = dump.nodes
    outgoing: dict = {k: [] for k in nodes}
    for e in dump.edges:
        outgoing[e.source].append(e)

    stats = GraphStats()
    dests: dict[str, set] = {}
    state = ReduceState()
    edge_state = ReduceState()
    edge_index = 0
    for i, (key, node) in enumerate(nodes.items()):
        origin = node.entity
        props_shape, ts = typed_props(node.props)
        degree: Counter = Counter()
        edge_shapes = []
        for e in outgoing[key]:
            dest = nodes[e.target].entity
            degree[(e.type, dest)] += 1
            eshape, ets = typed_props(e.props)
            edge_shapes.append((e.type, dest, eshape))
            dests.setdefault(e.type, set()).add(dest)
        shape = NodeShape(props_shape, tuple(sorted(degree)))
        state.add(origin, "entity", shape, ts, i)
        for (etype, dest), n in degree.items():
            k = (etype, origin, dest)
            stats.max_out[k] = max(stats.max_out.get(k, 0), n)
        for etype, dest, eshape in edge_shapes:
            stats.cooccurrence.setdefault((origin, shape, etype, dest), Counter())[eshape] += 1
    # edges are numbered in file order so relationship variation ids follow the dump
    for e in dump.edges:
        eshape, ets = typed_props(e.props)
        edge_state.add(e.type, "relationship", eshape, ets, edge_index)
        edge_index += 1
    stats.destinations = {t: sorted(d) for t, d in dests.items()}
    return state.results(), edge_state.results(), stats


def _attributes(props: tuple) -> list[Attribute]:
    return [Attribute(name, t) for name, t in props]


def build_graph(node_variations: list[VariationSchema], edge_variations: list[VariationSchema],
                stats: GraphStats, db_name: str, labels: dict | None = None) -> USchemaModel:
    """``labels`` maps multi-label entity names to their label tuples."""
    rel_ids: dict[tuple[str, object], int] = {}
    rels: dict[str, list[StructuralVariation]] = {}
    for v in edge_variations:
        vs = rels.setdefault(v.name, [])
        vid = len(vs) + 1
        rel_ids[(v.name, v.shape)] = vid
        vs.append(StructuralVariation(vid, v.count, tuple(_attributes(v.shape)),
                                      v.first_timestamp, v.last_timestamp))

    ents: dict[str, list[StructuralVariation]] = {}
    for v in node_variations:
        shape: NodeShape = v.shape
        feats: list = _attributes(shape.props)
        for etype, dest in shape.out:
            deg = stats.max_out.get((etype, v.name, dest), 1)
            counts = stats.cooccurrence.get((v.name, shape, etype, dest), Counter())
            featured = None
            if counts:
                best = min(counts.items(), key=lambda kv: (-kv[1], rel_ids[(etype, kv[0])]))
                featured = VariationRef(etype, rel_ids[(etype, best[0])])
            feats.append(Reference(etype, dest, (), 1, UNBOUNDED if deg >= 2 else 1,
                                   featured_by=featured))
        vs = ents.setdefault(v.name, [])
        vs.append(StructuralVariation(len(vs) + 1, v.count, tuple(feats),
                                      v.first_timestamp, v.last_timestamp))

    labels = labels or {}
    parents_of: dict[str, tuple[str, ...]] = {}
    for name, labs in labels.items():
        if len(labs) > 1:
            parents_of[name] = tuple(sorted(labs))
            for p in labs:
                if p not in ents:
                    ents[p] = [StructuralVariation(1, 0, ())]

    entities = tuple(
        EntityType(name, tuple(vs), root=True, parents=parents_of.get(name, ()))
        for name, vs in ents.items()
    )
    relationships = tuple(RelationshipType(n, tuple(vs)) for n, vs in rels.items())
    return USchemaModel(db_name, entities, relationships, paradigm="graph")


def infer_graph(dump: GraphDump, db_name: str) -> USchemaModel:
    nodes, edges, stats = graph_variations(dump)
    labels = {n.entity: n.labels for n in dump.nodes.values()}
    return build_graph(nodes, edges, stats, db_name, labels)
