"""Command line entry point: ``silhouvol <subcommand> ...``."""
import argparse
import logging
import sys

from . import pipeline
from .exceptions import SilhouvolError
from .metrics_report import dumps, emit_report, load_records, scatter_csv, write_text_atomic
from .segmentation import ChromaKeyConfig
from .slice_horizontal import MODES, SIGNS

log = logging.getLogger("silhouvol")


def _add_chroma(p):
    p.add_argument("--hue", type=float, default=None, help="keyed hue center, degrees")
    p.add_argument("--tol", type=float, default=None, help="hue half-window, degrees")
    p.add_argument("--min-sat", type=float, default=None)
    p.add_argument("--min-val", type=float, default=None)


def _chroma(args, base=ChromaKeyConfig()):
    return ChromaKeyConfig(
        hue_center=base.hue_center if args.hue is None else args.hue,
        hue_tolerance=base.hue_tolerance if args.tol is None else args.tol,
        min_saturation=base.min_saturation if args.min_sat is None else args.min_sat,
        min_value=base.min_value if args.min_val is None else args.min_val,
    )


def _add_horizontal(p, defaults=True):
    d = (lambda v: v) if defaults else (lambda v: None)
    p.add_argument("--fps", type=float, default=None)
    p.add_argument("--period", type=float, default=None, help="seconds per revolution")
    p.add_argument("--mode", choices=MODES, default=d("average"))
    p.add_argument("--thickness", type=float, default=d(1.0))
    p.add_argument("--eq45-sign", choices=SIGNS, default=d("minus"))
    p.add_argument("--angle-window", type=float, default=d(0.3),
                   help="derivative smoothing span in radians (0 = off)")


def build_parser():
    parser = argparse.ArgumentParser(prog="silhouvol", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="render a scene file to a mask (or RGB) sequence")
    p.add_argument("--scene", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("png", "pgm"), default="png")
    p.add_argument("--rgb", action="store_true", help="write green-screen RGB frames")

    p = sub.add_parser("segment", help="chroma-key RGB frames into masks")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("png", "pgm"), default="png")
    _add_chroma(p)

    p = sub.add_parser("estimate-vertical", help="solid-of-revolution estimate")
    p.add_argument("--masks", required=True)
    p.add_argument("--scale", type=float, default=None, help="cm per pixel")
    p.add_argument("--slope-window", type=int, default=7)
    p.add_argument("--report", required=True)

    p = sub.add_parser("estimate-horizontal", help="slice-sum estimate")
    p.add_argument("--masks", required=True)
    _add_horizontal(p)
    p.add_argument("--scale", type=float, default=None, help="cm per pixel")
    p.add_argument("--report", required=True)

    p = sub.add_parser("report", help="summarise measurement records")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--csv", default=None, help="scatter CSV output")
    p.add_argument("--mode", choices=MODES, default="average")

    p = sub.add_parser("run", help="run a JSON-configured pipeline")
    p.add_argument("--config", required=True)
    p.add_argument("--pipeline", choices=pipeline.PIPELINES, default=None)
    _add_horizontal(p, defaults=False)
    _add_chroma(p)
    p.add_argument("--scale", type=float, default=None, help="cm per pixel")
    p.add_argument("--report", default=None)
    return parser


def _timing(args):
    stored = pipeline.read_sequence_meta(args.masks) or (30.0, 20.0)
    fps = stored[0] if args.fps is None else args.fps
    period = stored[1] if args.period is None else args.period
    return fps, period


def _dispatch(args):
    if args.command == "synth":
        n = pipeline.synth(args.scene, args.out, args.format, args.rgb)
        print(f"wrote {n} frames to {args.out}")
    elif args.command == "segment":
        n = pipeline.segment(args.in_dir, args.out, _chroma(args), args.format)
        print(f"segmented {n} frames into {args.out}")
    elif args.command == "estimate-vertical":
        masks = pipeline.load_masks(args.masks)
        doc = pipeline.vertical_section(masks, args.scale, args.slope_window)
        write_text_atomic(args.report, dumps(doc))
        print(f"mean volume {doc['mean_volume_px3']:.6g} px^3, "
              f"mean area {doc['mean_area_px2']:.6g} px^2")
    elif args.command == "estimate-horizontal":
        fps, period = _timing(args)
        masks = pipeline.load_masks(args.masks)
        doc = pipeline.horizontal_section(masks, fps, period, args.mode, args.thickness,
                                          args.eq45_sign, args.scale, args.angle_window)
        write_text_atomic(args.report, dumps(doc))
        vols = ", ".join(f"{k} {v:.6g}" for k, v in doc["volumes_px3"].items())
        print(f"volume ({args.mode}) {doc['volume_px3']:.6g} px^3 [{vols}]")
    elif args.command == "report":
        records = load_records(args.in_path)
        doc = emit_report(records, args.mode)
        write_text_atomic(args.out, dumps(doc))
        if args.csv:
            write_text_atomic(args.csv, scatter_csv(records, args.mode))
        s = doc["summary"]
        print(f"MAE vertical {_fmt(s['mae_vertical'])}%, horizontal {_fmt(s['mae_horizontal'])}%, "
              f"sigma manual {_fmt(s['sigma_manual_population'])}")
    elif args.command == "run":
        cfg = pipeline.RunConfig.load(args.config)
        chroma = _chroma(args, cfg.chroma)
        cfg = cfg.override(pipeline=args.pipeline, fps=args.fps, rotation_period_s=args.period,
                           mode=args.mode, thickness=args.thickness, eq45_sign=args.eq45_sign,
                           angle_window=args.angle_window, cm_per_pixel=args.scale,
                           report=args.report, chroma=chroma)
        pipeline.run(cfg)
        print(f"wrote {cfg.resolve(cfg.report)}")
    return 0


def _fmt(v):
    return "n/a" if v is None else f"{v:.2f}"


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _dispatch(args)
    except SilhouvolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
