"""Command-line front end: ``uschema <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import fixtures
from .errors import USchemaError
from .model.canonical import compare
from .model.dot import export_dot
from .model.serialize import load_model, save_model
from .model.union import to_union_schema
from .pipeline import PARADIGMS, infer
from .refdetect import RefConfig
from .reverse import (
    reverse_columnar,
    reverse_document,
    reverse_graph,
    reverse_keyvalue,
    reverse_relational,
)
from .synth import generate_scale_family, synth_dataset, write_columnar, write_document, \
    write_keyvalue
from .validate import (
    EXIT_ERROR,
    all_variations_exist,
    bench_inference,
    count_correctness,
    render_bench,
    roundtrip_check,
)

log = logging.getLogger("uschema")


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")


def cmd_infer(args) -> int:
    refs = RefConfig(threshold=args.ref_threshold, enabled=not args.no_refs)
    model = infer(args.paradigm, args.input, refs=refs, flavor=args.flavor,
                  threads=args.threads, name=args.name)
    save_model(model, args.out)
    return 0


def cmd_union(args) -> int:
    save_model(to_union_schema(load_model(args.model)), args.out)
    return 0


def cmd_compare(args) -> int:
    diff = compare(load_model(args.a), load_model(args.b), ignore_counts=args.ignore_counts,
                   ignore_key_links=args.ignore_key_links)
    if args.json:
        sys.stdout.write(json.dumps(diff.to_json(), indent=2) + "\n")
    elif diff:
        sys.stdout.write(diff.render() + "\n")
    else:
        sys.stdout.write("models are equal\n")
    return 1 if diff else 0


_REVERSE = {"document": reverse_document, "keyvalue": reverse_keyvalue,
            "columnar": reverse_columnar, "graph": reverse_graph}


def cmd_reverse(args) -> int:
    model = load_model(args.model)
    if args.paradigm == "relational":
        warnings: list[str] = []
        ddl = reverse_relational(model, args.variation_strategy, args.aggregate_strategy, warnings)
        _write(args.out, ddl)
        return 0
    out = replace(_REVERSE[args.paradigm](model), paradigm=args.paradigm)
    save_model(out, args.out)
    return 0


def _load_counts(path: str | None) -> dict | None:
    if path is None:
        return None
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise USchemaError(f"cannot read counts file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise USchemaError("counts file must hold a JSON object")
    return data


def cmd_synth(args) -> int:
    manifest = synth_dataset(load_model(args.model), args.paradigm, args.out, scale=args.scale,
                             seed=args.seed, counts=_load_counts(args.counts),
                             apply_reverse=args.apply_reverse_mapping)
    log.info("wrote %d objects to %s", manifest["objects"], args.out)
    return 0


def cmd_family(args) -> int:
    factors = [int(f) for f in args.factors.split(",")]
    if args.model:
        generate_scale_family(load_model(args.model), factors, args.seed, args.out, args.paradigm)
    else:
        unknown = [f for f in factors if f not in fixtures.SCALE_FAMILY]
        if unknown:
            raise USchemaError(f"the running-example family has factors "
                               f"{sorted(fixtures.SCALE_FAMILY)}, not {unknown}")
        generate_scale_family(fixtures.aggregate_model(args.paradigm), factors, args.seed,
                              args.out, args.paradigm, counts_for=fixtures.scale_counts)
    return 0


def cmd_validate(args) -> int:
    model = load_model(args.model)
    if args.check == "roundtrip":
        report = roundtrip_check(model, args.paradigm, args.seed,
                                 apply_reverse=args.apply_reverse_mapping, threads=args.threads)
    else:
        if args.input is None:
            raise USchemaError(f"--input is required for the {args.check} check")
        fn = all_variations_exist if args.check == "variations" else count_correctness
        report = fn(model, args.input, args.paradigm, threads=args.threads)
    sys.stdout.write(report.to_json())
    return report.exit_code


def cmd_export(args) -> int:
    _write(args.out, export_dot(load_model(args.model)))
    return 0


def cmd_bench(args) -> int:
    report = bench_inference(args.family, threads=args.threads, repeats=args.repeats)
    _write(args.out, json.dumps(report, indent=2) + "\n")
    sys.stdout.write(render_bench(report) + "\n")
    return 0


def cmd_example(args) -> int:
    records = fixtures.logical_records(args.users, args.movies, args.per_user, seed=args.seed)
    writer = {"document": write_document, "keyvalue": write_keyvalue,
              "columnar": write_columnar}[args.paradigm]
    writer(args.out, records)
    return 0


def _threads(p) -> None:
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: USCHEMA_THREADS or available CPUs)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uschema",
                                     description="Infer, compare, reverse and validate "
                                                 "U-Schema models of database dumps.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("infer", help="infer a model from a dump")
    p.add_argument("--paradigm", required=True, choices=PARADIGMS)
    p.add_argument("--input", required=True)
    p.add_argument("--out", "-o", required=True)
    p.add_argument("--no-refs", action="store_true", help="disable reference detection")
    p.add_argument("--ref-threshold", type=float, default=0.95)
    p.add_argument("--flavor", choices=("full", "union"), default="full")
    p.add_argument("--name", default=None, help="model name (default: input name)")
    _threads(p)
    p.set_defaults(fn=cmd_infer)

    p = sub.add_parser("union", help="convert a model to the union flavor")
    p.add_argument("model")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(fn=cmd_union)

    p = sub.add_parser("compare", help="diff two models; exit 1 when they differ")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--ignore-counts", action="store_true")
    p.add_argument("--ignore-key-links", action="store_true",
                   help="ignore which attributes keys are linked to")
    p.add_argument("--json", action="store_true", help="print the diff as JSON")
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("reverse", help="map a model onto one paradigm")
    p.add_argument("--paradigm", required=True, choices=PARADIGMS)
    p.add_argument("model")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--variation-strategy", choices=("per-table", "union-nulls"),
                   default="per-table")
    p.add_argument("--aggregate-strategy", choices=("inline-1to1", "separate-table"),
                   default="inline-1to1")
    p.set_defaults(fn=cmd_reverse)

    p = sub.add_parser("synth", help="generate a dataset from a model")
    p.add_argument("model")
    p.add_argument("--paradigm", required=True, choices=PARADIGMS)
    p.add_argument("--scale", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--apply-reverse-mapping", action="store_true")
    p.add_argument("--counts", help="JSON file with per-variation counts")
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("family", help="generate a scale family for bench")
    p.add_argument("--model", help="model file (default: the running example)")
    p.add_argument("--paradigm", choices=("document", "keyvalue", "columnar"), default="document")
    p.add_argument("--factors", default="1,2,4,8")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(fn=cmd_family)

    p = sub.add_parser("validate", help="run a validation check")
    p.add_argument("--check", required=True, choices=("roundtrip", "variations", "counts"))
    p.add_argument("--paradigm", required=True, choices=PARADIGMS)
    p.add_argument("--model", required=True)
    p.add_argument("--input", help="dataset directory (variations and counts checks)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--apply-reverse-mapping", action="store_true")
    _threads(p)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("export", help="export a model as Graphviz DOT")
    p.add_argument("--format", choices=("dot",), default="dot")
    p.add_argument("model")
    p.add_argument("-o", "--out", default="-")
    p.set_defaults(fn=cmd_export)

    p = sub.add_parser("bench", help="time inference over a scale family")
    p.add_argument("--family", required=True)
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--repeats", type=int, default=1)
    _threads(p)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("example", help="write the running-example dataset")
    p.add_argument("--paradigm", choices=("document", "keyvalue", "columnar"), default="document")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--users", type=int, default=fixtures.SMALL["users"])
    p.add_argument("--movies", type=int, default=fixtures.SMALL["movies"])
    p.add_argument("--per-user", type=int, default=fixtures.SMALL["per_user"])
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(fn=cmd_example)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.fn(args)
    except (USchemaError, ValueError, OSError) as exc:
        print(f"uschema {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
