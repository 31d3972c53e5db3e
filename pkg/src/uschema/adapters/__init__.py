from .columnar import decode_row, encode_row, read_columnar
from .ddl import Column, DdlSchema, ForeignKey, Table, parse_ddl
from .document import read_document
from .graph import Edge, GraphDump, Node, entity_name, read_graph
from .keyvalue import (
    FlatKey,
    Segment,
    flatten_record,
    parse_flat_key,
    read_keyvalue,
    reconstruct_kv_objects,
)
