"""Command line interface.

Subcommands: gen (single image), batch (manifest run), compose, stats,
sketch-prep.  Exit codes: 0 ok, 1 usage error, 2 data error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import dataset, pipeline
from .errors import RbteError
from .image import load_image, save_binary

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load_spec(args) -> pipeline.PipelineSpec:
    spec = pipeline.load_spec(args.config) if args.config else pipeline.PipelineSpec()
    if args.seed is not None:
        spec = pipeline.PipelineSpec.from_dict({**spec.to_dict(), "seed": args.seed})
    return spec


def _cmd_gen(args) -> int:
    spec = _load_spec(args)
    mask, decision = pipeline.transform(args.image, spec, index=args.index)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_binary(mask, out)
    if args.decision_log:
        pipeline.log_decisions([decision], args.decision_log)
    print(f"wrote {out} ({int(mask.sum())} edge pixels)")
    return EXIT_OK


def _cmd_batch(args) -> int:
    spec = _load_spec(args)
    records = dataset.read_manifest(args.manifest)
    result = dataset.run_batch(
        records,
        spec,
        args.out_dir,
        workers=args.workers,
        draws=args.draws,
        strict=args.strict,
    )
    for name in sorted(result.per_class):
        print(f"{name}: {result.per_class[name]}")
    print(f"wrote {result.files} maps, {len(result.failures)} failures")
    for path, index, msg in result.failures:
        print(f"failed: {path} draw {index}: {msg}", file=sys.stderr)
    return EXIT_OK


def _cmd_compose(args) -> int:
    records = []
    for path in args.inputs:
        records.extend(dataset.read_manifest(path))
    class_map = dataset.read_class_map(args.map)
    composed = dataset.compose(
        records, class_map, cap=args.cap, seed=args.seed or 0, strict=args.strict
    )
    dataset.write_manifest(composed, args.output)
    n_classes = len({r.class_name for r in composed})
    print(f"wrote {args.output}: {len(composed)} records, {n_classes} classes")
    return EXIT_OK


def _cmd_stats(args) -> int:
    first = dataset.read_manifest(args.manifest)
    print(dataset.format_stats(dataset.stats(first)))
    if args.other:
        second = dataset.read_manifest(args.other)
        common = dataset.common_classes(first, second)
        print(f"common classes with {args.other}: {len(common)}")
    return EXIT_OK


def _cmd_sketch_prep(args) -> int:
    sketch = load_image(args.sketch)
    dark_on_light = not args.light_on_dark
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.single:
        mask = pipeline.prep_sketch_single(sketch, dark_on_light=dark_on_light)
        save_binary(mask, out)
        print(f"wrote {out}")
        return EXIT_OK
    scales = tuple(float(s) for s in args.scales.split(","))
    masks = pipeline.prep_sketch_multiscale(sketch, scales, dark_on_light=dark_on_light)
    for scale, mask in zip(scales, masks):
        path = out.with_name(f"{out.stem}.s{int(round(scale * 100)):03d}{out.suffix}")
        save_binary(mask, path)
        print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rbte", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="transform one image into a binary thin-edge map")
    gen.add_argument("image")
    gen.add_argument("-o", "--output", required=True)
    gen.add_argument("--config", help="pipeline config JSON")
    gen.add_argument("--seed", type=int)
    gen.add_argument("--index", type=int, default=0, help="draw index (default 0)")
    gen.add_argument("--decision-log", help="append the decision record here")
    gen.set_defaults(func=_cmd_gen)

    batch = sub.add_parser("batch", help="run a manifest through the pipeline")
    batch.add_argument("manifest")
    batch.add_argument("out_dir")
    batch.add_argument("--config")
    batch.add_argument("--seed", type=int)
    batch.add_argument(
        "--workers",
        type=int,
        default=None,
        help="parallel workers (default: RBTE_NUM_THREADS or 1)",
    )
    batch.add_argument("--draws", type=int, default=1, help="draws per image")
    batch.add_argument("--strict", action="store_true", help="fail on any record error")
    batch.set_defaults(func=_cmd_batch)

    comp = sub.add_parser("compose", help="merge manifests through a class map")
    comp.add_argument("output")
    comp.add_argument("--inputs", nargs="+", required=True)
    comp.add_argument("--map", required=True, help="class map CSV")
    comp.add_argument("--cap", type=int, default=None, help="max records per class and split")
    comp.add_argument("--seed", type=int)
    comp.add_argument("--strict", action="store_true", help="error on unmapped classes")
    comp.set_defaults(func=_cmd_compose)

    st = sub.add_parser("stats", help="print per-class and per-source counts")
    st.add_argument("manifest")
    st.add_argument("other", nargs="?", help="second manifest for common-class count")
    st.set_defaults(func=_cmd_stats)

    sp = sub.add_parser("sketch-prep", help="thin a sketch for inference")
    sp.add_argument("sketch")
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--single", action="store_true", help="single-scale output")
    sp.add_argument("--scales", default="0.90,0.65,0.45")
    sp.add_argument(
        "--light-on-dark",
        action="store_true",
        help="sketch is bright strokes on dark background",
    )
    sp.set_defaults(func=_cmd_sketch_prep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except RbteError as e:
        print(f"rbte: {e}", file=sys.stderr)
        return EXIT_DATA
    except OSError as e:
        print(f"rbte: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
