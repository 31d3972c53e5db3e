"""U-Schema inference, comparison, reverse mapping and validation for database dumps."""

from __future__ import annotations

from .errors import BuildError, ModelError, ParseError, SynthError, USchemaError
from .model import (
    USchemaModel,
    canonicalize,
    compare,
    export_dot,
    load_model,
    save_model,
    to_union_schema,
)
from .pipeline import PARADIGMS, infer, infer_records
from .refdetect import RefConfig
from .reverse import (
    reverse_columnar,
    reverse_document,
    reverse_graph,
    reverse_keyvalue,
    reverse_relational,
)
from .synth import generate_scale_family, synth_dataset
from .validate import all_variations_exist, bench_inference, count_correctness, roundtrip_check

__version__ = "0.1.0"
