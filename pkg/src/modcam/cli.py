"""Command-line entry points.

Subcommands: simulate (emit scenario PNGs + latent PFMs), reconstruct (unwrap
one modulo PNG), evaluate (score one detections file), sweep (full report),
bench (solver timing).  Exit codes: 0 success, 2 configuration error,
3 evaluation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bench import DEFAULT_SIZES, benchmark_spud
from .detection import TimingModel, compute_metrics, match_detections
from .errors import ConfigError, EvalError, ModcamError
from .imaging import ModuloImage, ScenarioMode, SensorConfig
from .pfm import write_pfm
from .pipeline import (
    DEFAULT_ALPHAS,
    ReferenceMode,
    RunConfig,
    load_detections,
    load_raw_image,
    load_truth,
    save_png,
    simulate,
    sweep,
)
from .spud import RecoveryParams, spud_reconstruct

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_EVAL = 3


def _parse_modes(values: list[str] | None) -> tuple[ScenarioMode, ...]:
    if not values:
        return tuple(ScenarioMode)
    return tuple(ScenarioMode(v.lower()) for v in values)


def _parse_sizes(spec: str) -> tuple[tuple[int, int], ...]:
    sizes = []
    for token in spec.split(","):
        w, h = token.lower().split("x")
        sizes.append((int(h), int(w)))
    return tuple(sizes)


def _run_config(args: argparse.Namespace) -> RunConfig:
    timing = TimingModel(
        spud_ms=getattr(args, "spud_ms", 0.0),
        detect_ms=getattr(args, "detect_ms", 0.0),
    )
    return RunConfig(
        input_dir=Path(args.input),
        output_dir=Path(args.out),
        labels_dir=Path(args.labels) if getattr(args, "labels", None) else None,
        detections_path=Path(args.detections) if getattr(args, "detections", None) else None,
        bit_depth=args.bit_depth,
        alphas=tuple(args.alpha) if args.alpha else DEFAULT_ALPHAS,
        tau=args.tau,
        modes=_parse_modes(args.mode),
        iou_min=getattr(args, "iou_min", 0.5),
        reference=ReferenceMode(getattr(args, "reference", "groundtruth")),
        limit=args.limit,
        seed=args.seed,
        timing=timing,
    )


def cmd_simulate(args: argparse.Namespace) -> int:
    stats = simulate(_run_config(args))
    held = sum(1 for s in stats if s["itoh_holds"])
    print(f"processed {len(stats)} cells; gradient condition held in {held}")
    return EXIT_OK


def cmd_reconstruct(args: argparse.Namespace) -> int:
    cfg = SensorConfig(args.bit_depth)
    codes = load_raw_image(args.input).astype(np.int32)
    recovered = spud_reconstruct(
        ModuloImage(codes, args.bit_depth), cfg, RecoveryParams(tau=args.tau)
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if out.suffix.lower() == ".pfm":
        write_pfm(out, recovered.data)
    else:
        save_png(out, np.clip(np.floor(recovered.data / args.alpha), 0, 255))
    print(f"wrote {out}")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    preds = load_detections(args.detections)
    image_ids = sorted(preds)
    truth = load_truth(Path(args.labels), image_ids)
    matchings = [
        match_detections(preds[i], truth[i], args.iou_min) for i in image_ids
    ]
    report = compute_metrics(matchings)
    print(json.dumps({
        "images": len(image_ids),
        "tp": report.tp, "fp": report.fp, "fn": report.fn,
        "mean_iou": round(report.mean_iou, 6),
        "f1": round(report.f1, 6),
        "accuracy": round(report.accuracy, 6),
    }, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    report = sweep(_run_config(args))
    for row in report.rows:
        print(f"{row.cell:>24}  iou={row.metrics.mean_iou:.3f}"
              f"  f1={row.metrics.f1:.3f}  acc={row.metrics.accuracy:.3f}"
              f"  latency={row.latency_ms:.2f}ms")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    sizes = _parse_sizes(args.sizes) if args.sizes else DEFAULT_SIZES
    result = benchmark_spud(sizes=sizes, repeats=args.repeats, tau=args.tau)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        result.write_csv(args.out)
    for row in result.rows:
        print(f"{row.width}x{row.height}: {row.mean_ms:.2f} ms "
              f"± {row.std_ms:.2f} (min {row.min_ms:.2f}, n={row.repeats})")
    print(f"log-log slope vs pixels: {result.loglog_slope():.3f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modcam",
        description="Modulo-camera simulation, HDR recovery and detection evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--bit-depth", type=int, default=8, dest="bit_depth")
        p.add_argument("--tau", type=float, default=0.0,
                       help="hard-threshold level for recovery")

    p = sub.add_parser("simulate", help="emit scenario PNGs and latent PFMs")
    p.add_argument("--input", required=True, help="directory of source PNGs")
    p.add_argument("--out", required=True)
    p.add_argument("--alpha", type=float, action="append",
                   help="exposure gain, repeatable (default 1.5 2 3 4)")
    p.add_argument("--mode", action="append",
                   choices=[m.value for m in ScenarioMode])
    p.add_argument("--limit", type=int, default=100)
    p.add_argument("--seed", type=int, default=None,
                   help="seeded image sampling instead of first-N")
    add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reconstruct", help="unwrap one modulo PNG")
    p.add_argument("--input", required=True, help="modulo PNG")
    p.add_argument("--out", required=True, help=".pfm for the raw recovery, "
                   ".png for a tone-mapped preview")
    p.add_argument("--alpha", type=float, default=1.0,
                   help="gain used when tone-mapping PNG output")
    add_common(p)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("evaluate", help="score one detections JSON file")
    p.add_argument("--detections", required=True)
    p.add_argument("--labels", required=True, help="KITTI label directory")
    p.add_argument("--iou-min", type=float, default=0.5, dest="iou_min")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="simulate, score every cell, write reports")
    p.add_argument("--input", required=True)
    p.add_argument("--labels", default=None)
    p.add_argument("--detections", required=True,
                   help="directory of per-cell detections JSON files")
    p.add_argument("--out", required=True)
    p.add_argument("--alpha", type=float, action="append")
    p.add_argument("--mode", action="append",
                   choices=[m.value for m in ScenarioMode])
    p.add_argument("--iou-min", type=float, default=0.5, dest="iou_min")
    p.add_argument("--reference", default="groundtruth",
                   choices=[r.value for r in ReferenceMode])
    p.add_argument("--limit", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--spud-ms", type=float, default=5.1, dest="spud_ms",
                   help="recovery time used in the latency column")
    p.add_argument("--detect-ms", type=float, default=0.0, dest="detect_ms",
                   help="detector inference time used in the latency column")
    add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench", help="time the recovery solver per size")
    p.add_argument("--sizes", default=None,
                   help="comma-separated WxH list, e.g. 1242x375,512x512")
    p.add_argument("--repeats", type=int, default=7)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--out", default=None, help="CSV output path")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EvalError as exc:
        print(f"evaluation error: {exc}", file=sys.stderr)
        return EXIT_EVAL
    except ModcamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
