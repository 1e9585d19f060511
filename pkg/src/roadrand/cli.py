"""roadrand command line: generate / stats / weights / eval / composite /
describe / preview / synthloss-demo.

Exit codes: 0 success, 1 partial failure, 2 invalid configuration or
arguments.  ROADRAND_THREADS caps the generation worker pool.
"""

import argparse
import json
import sys

import numpy as np

from . import pipeline, synthloss
from .markings import describe_templates
from .pipeline import ConfigError

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_CONFIG = 2


def _add_generate(sub):
    p = sub.add_parser("generate", help="generate randomized marking labels")
    p.add_argument("--sources", required=True, help="source manifest (JSONL)")
    p.add_argument("--calib", required=True, help="camera calibration JSON")
    p.add_argument("--config", required=True, help="generation config JSON")
    p.add_argument(
        "--class", dest="classes", action="append", required=True,
        help="target marking class name (repeatable)",
    )
    p.add_argument(
        "--count", dest="counts", action="append", type=int, required=True,
        help="labels to generate for the matching --class (repeatable)",
    )
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="master seed (overrides config)")
    p.add_argument("--palette", default=None, help="palette JSON (default: built-in)")
    p.add_argument("--workers", type=int, default=1, help="worker threads")
    p.add_argument("--preview", action="store_true", help="also write colour previews")


def _add_stats(sub):
    p = sub.add_parser("stats", help="count class pixels and occurrences")
    p.add_argument("--manifest", required=True, help="label manifest (JSONL)")
    p.add_argument("--out", required=True, help="stats JSON output path")
    p.add_argument("--palette", default=None)


def _add_weights(sub):
    p = sub.add_parser("weights", help="compute class-balancing loss weights")
    p.add_argument("--stats", required=True, help="stats JSON from the stats command")
    p.add_argument("--scheme", required=True, choices=["eq", "fb", "tb"])
    p.add_argument("--out", required=True, help="weights JSON output path")
    p.add_argument("--palette", default=None)
    p.add_argument(
        "--include-background", action="store_true",
        help="include the background class in the balancing medians",
    )


def _add_eval(sub):
    p = sub.add_parser("eval", help="pixel-wise segmentation metrics")
    p.add_argument("--pred-manifest", required=True)
    p.add_argument("--gt-manifest", required=True)
    p.add_argument(
        "--classes", required=True,
        help="comma-separated class names to evaluate",
    )
    p.add_argument("--out", required=True, help="report JSON path (CSV written alongside)")
    p.add_argument("--palette", default=None)
    p.add_argument("--ignore-id", type=int, default=255)
    p.add_argument(
        "--pooled", action="store_true",
        help="pool TP/FP/FN over the set instead of per-image averaging",
    )


def _add_composite(sub):
    p = sub.add_parser("composite", help="substitute the synthesized road surface")
    p.add_argument("--original", required=True)
    p.add_argument("--synthesized", required=True)
    p.add_argument("--label", required=True)
    p.add_argument("--config", required=True, help="generation config JSON (scene ids)")
    p.add_argument("--out", required=True)
    p.add_argument("--feather", type=int, default=0, help="feathering radius, pixels")


def _add_describe(sub):
    p = sub.add_parser("describe", help="print template parameter documentation")
    p.add_argument("--template", default=None, help="single template name")


def _add_preview(sub):
    p = sub.add_parser("preview", help="render colour previews of labels")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", default=None, help="generation config (for scene colours)")
    p.add_argument("--palette", default=None)


def _add_synthloss_demo(sub):
    p = sub.add_parser(
        "synthloss-demo", help="evaluate the synthesis loss combinators on random pyramids"
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scales", type=int, default=synthloss.DEFAULT_SCALES)
    p.add_argument("--layers", type=int, default=4)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roadrand",
        description="synthetic road-marking labels, balancing weights, and metrics",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_generate(sub)
    _add_stats(sub)
    _add_weights(sub)
    _add_eval(sub)
    _add_composite(sub)
    _add_describe(sub)
    _add_preview(sub)
    _add_synthloss_demo(sub)
    return parser


def _cmd_generate(args) -> int:
    if len(args.classes) != len(args.counts):
        raise ConfigError("--class and --count must be given the same number of times")
    class_counts = list(zip(args.classes, args.counts))
    result = pipeline.run_generate(
        args.sources,
        args.calib,
        args.config,
        class_counts,
        args.out,
        seed=args.seed,
        palette_path=args.palette,
        workers=args.workers,
        write_preview=args.preview,
    )
    print(f"generated {len(result.records)} labels -> {args.out}")
    if result.errors:
        print(f"{len(result.errors)} entries failed (see errors.jsonl)", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def _cmd_stats(args) -> int:
    payload = pipeline.run_stats(args.manifest, args.out, args.palette)
    print(f"counted {payload['total_images']} labels -> {args.out}")
    return EXIT_OK


def _cmd_weights(args) -> int:
    pipeline.run_weights(
        args.stats, args.scheme, args.out, args.palette, args.include_background
    )
    print(f"{args.scheme} weights -> {args.out}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    classes = [c.strip() for c in args.classes.split(",") if c.strip()]
    if not classes:
        raise ConfigError("--classes must name at least one class")
    payload = pipeline.run_eval(
        args.pred_manifest, args.gt_manifest, classes, args.out,
        palette_path=args.palette, ignore_id=args.ignore_id, pooled=args.pooled,
    )
    miou = payload["mean"]["miou"]
    print(f"mIoU {miou if miou is None else f'{miou:.4f}'} -> {args.out}")
    return EXIT_OK


def _cmd_composite(args) -> int:
    pipeline.run_composite(
        args.original, args.synthesized, args.label, args.out, args.config, args.feather
    )
    print(f"composite -> {args.out}")
    return EXIT_OK


def _cmd_describe(args) -> int:
    docs = describe_templates()
    if args.template is not None:
        if args.template not in docs:
            raise ConfigError(f"unknown template {args.template!r}")
        docs = {args.template: docs[args.template]}
    print(json.dumps(docs, indent=2))
    return EXIT_OK


def _cmd_preview(args) -> int:
    written = pipeline.run_preview(args.manifest, args.out, args.config, args.palette)
    print(f"wrote {len(written)} previews -> {args.out}")
    return EXIT_OK


def _cmd_synthloss_demo(args) -> int:
    rng = np.random.Generator(np.random.Philox(key=args.seed))

    def pyramid():
        return [
            [rng.normal(size=(4, 6)) for _ in range(args.layers)]
            for _ in range(args.scales)
        ]

    real, fake = pyramid(), pyramid()
    real_scores = [rng.uniform(0.05, 0.95, size=(3, 5)) for _ in range(args.scales)]
    fake_scores = [rng.uniform(0.05, 0.95, size=(3, 5)) for _ in range(args.scales)]
    weights = synthloss.LossWeights(layers_fm=args.layers, layers_perceptual=args.layers)
    fm = synthloss.feature_matching_loss(real, fake, args.layers)
    vgg = synthloss.perceptual_loss(real[0], fake[0], args.layers)
    gan = synthloss.gan_loss(real_scores, fake_scores)
    total = synthloss.total_objective(gan.generator_per_scale, fm, vgg, weights)
    print(
        json.dumps(
            {
                "feature_matching": fm,
                "perceptual": vgg,
                "gan_generator_per_scale": list(gan.generator_per_scale),
                "gan_discriminator_per_scale": list(gan.discriminator_per_scale),
                "total_objective": total,
            },
            indent=2,
        )
    )
    return EXIT_OK


_HANDLERS = {
    "generate": _cmd_generate,
    "stats": _cmd_stats,
    "weights": _cmd_weights,
    "eval": _cmd_eval,
    "composite": _cmd_composite,
    "describe": _cmd_describe,
    "preview": _cmd_preview,
    "synthloss-demo": _cmd_synthloss_demo,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARTIAL


if __name__ == "__main__":
    sys.exit(main())
