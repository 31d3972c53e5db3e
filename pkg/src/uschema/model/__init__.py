from .canonical import (
    DiffEntry,
    DiffReport,
    canonicalize,
    compare,
    strip_key_links,
    variation_digests,
)
from .dot import export_dot
from .serialize import deserialize, load_model, model_from_dict, model_to_dict, save_model, serialize
from .types import (
    BOOLEAN,
    NULL,
    NUMBER,
    STRING,
    UNBOUNDED,
    Aggregate,
    Attribute,
    DataType,
    EntityType,
    Feature,
    Key,
    ListOf,
    MapOf,
    NullType,
    Primitive,
    Reference,
    ReferenceLocator,
    RelationshipType,
    SetOf,
    StructuralVariation,
    TupleOf,
    USchemaModel,
    VariationRef,
    check_invariants,
    type_label,
)
from .union import to_union_schema
