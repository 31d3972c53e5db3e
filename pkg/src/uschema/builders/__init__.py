from .aggregate import AggregateModelBuilder, build_columnar, build_document, build_keyvalue
from .graph import GraphStats, NodeShape, build_graph, graph_variations, infer_graph
from .naming import lower_first, name_star
from .relational import build_relational, map_sql_type
