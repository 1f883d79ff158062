"""Run configuration and end-to-end orchestration."""
from dataclasses import dataclass, field, replace
import json
import os
import re
import shutil

from .exceptions import ConfigError, SilhouvolError, with_frame
from .geometry_synth import composite_on_green, load_scene, render_rotation_sequence
from .metrics_report import dumps, write_text_atomic
from .revolve_vertical import VerticalRevolveEstimator
from .segmentation import (
    MASK_SUFFIXES,
    ChromaKeyConfig,
    ChromaKeySegmenter,
    load_frame,
    load_mask,
    save_frame,
    save_mask,
)
from .slice_horizontal import MODES, SIGNS, HorizontalSliceEstimator
from .validation import check_choice, check_positive, parallel_map

SEQUENCE_FILE = "sequence.json"
PIPELINES = ("vertical", "horizontal", "both")
INPUT_KINDS = ("frames", "masks", "scene")
_INDEX_RE = re.compile(r"(\d+)$")


def discover_images(directory, suffixes):
    """Image files of ``directory`` in lexicographic order.

    Every stem must end in a zero-padded frame index of one common width.
    """
    if not os.path.isdir(directory):
        raise ConfigError(f"input directory {directory} does not exist")
    names = sorted(n for n in os.listdir(directory)
                   if os.path.splitext(n)[1].lower() in suffixes)
    if not names:
        raise ConfigError(f"no {'/'.join(suffixes)} files in {directory}")
    widths = set()
    for n in names:
        match = _INDEX_RE.search(os.path.splitext(n)[0])
        if match is None:
            raise ConfigError(f"{n}: file name must end in a zero-padded frame index")
        widths.add(len(match.group(1)))
    if len(widths) != 1:
        raise ConfigError(f"frame indices in {directory} are not zero-padded to one width")
    return [os.path.join(directory, n) for n in names]


def read_sequence_meta(directory):
    """``(fps, rotation_period_s)`` from a directory's sequence.json, if any."""
    path = os.path.join(directory, SEQUENCE_FILE)
    if not os.path.exists(path):
        return None
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        return float(doc["fps"]), float(doc["rotation_period_s"])
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"bad {path}: {exc}") from None


def load_masks(directory):
    paths = discover_images(directory, MASK_SUFFIXES)

    def one(item):
        i, p = item
        try:
            return load_mask(p)
        except SilhouvolError as exc:
            raise with_frame(exc, i) from None

    return parallel_map(one, enumerate(paths))


def load_frames(directory):
    return parallel_map(load_frame, discover_images(directory, (".png",)))


def write_masks(masks, directory, fmt="png", meta=None):
    os.makedirs(directory, exist_ok=True)
    width = max(5, len(str(len(masks) - 1)))
    for i, m in enumerate(masks):
        save_mask(m, os.path.join(directory, f"frame_{i:0{width}d}.{fmt}"))
    if meta is not None:
        write_text_atomic(os.path.join(directory, SEQUENCE_FILE), dumps(meta))


def write_frames(frames, directory, meta=None):
    os.makedirs(directory, exist_ok=True)
    width = max(5, len(str(len(frames) - 1)))
    for i, f in enumerate(frames):
        save_frame(f, os.path.join(directory, f"frame_{i:0{width}d}.png"))
    if meta is not None:
        write_text_atomic(os.path.join(directory, SEQUENCE_FILE), dumps(meta))


def vertical_section(masks, cm_per_pixel=None, slope_window=7):
    est = VerticalRevolveEstimator(slope_window=slope_window, cm_per_pixel=cm_per_pixel)
    doc = est.fit(masks).report()
    doc["slope_window"] = slope_window
    return doc


def horizontal_section(masks, fps, period, mode="average", thickness=1.0, sign="minus",
                       cm_per_pixel=None, angle_window=0.3):
    est = HorizontalSliceEstimator(fps=fps, rotation_period=period, mode=mode,
                                   thickness=thickness, eq45_sign=sign,
                                   angle_window=angle_window, cm_per_pixel=cm_per_pixel)
    return est.fit(masks).report()


@dataclass(frozen=True)
class RunConfig:
    input_kind: str
    input_path: str
    pipeline: str = "vertical"
    fps: float = None
    rotation_period_s: float = None
    mode: str = "average"
    thickness: float = 1.0
    eq45_sign: str = "minus"
    chroma: ChromaKeyConfig = field(default_factory=ChromaKeyConfig)
    cm_per_pixel: float = None
    report: str = "report.json"
    slope_window: int = 7
    angle_window: float = 0.3
    base_dir: str = "."

    def __post_init__(self):
        check_choice(self.input_kind, "input", INPUT_KINDS)
        check_choice(self.pipeline, "pipeline", PIPELINES)
        check_choice(self.mode, "mode", MODES)
        check_choice(self.eq45_sign, "eq45_sign", SIGNS)
        if check_positive(self.thickness, "thickness") < 1:
            raise ConfigError(f"thickness must be at least 1 px, got {self.thickness}")
        for name in ("fps", "rotation_period_s", "cm_per_pixel"):
            if getattr(self, name) is not None:
                check_positive(getattr(self, name), name)
        check_positive(self.angle_window, "angle_window", strict=False)
        if not isinstance(self.slope_window, int) or self.slope_window < 1 \
                or self.slope_window % 2 == 0:
            raise ConfigError(f"slope_window must be a positive odd integer, got {self.slope_window!r}")

    def resolve(self, path):
        return path if os.path.isabs(path) else os.path.join(self.base_dir, path)

    @classmethod
    def from_dict(cls, doc, base_dir="."):
        doc = dict(doc)
        source = doc.pop("input", None)
        if not isinstance(source, dict) or len(source) != 1:
            raise ConfigError("config 'input' must name exactly one of "
                              f"{', '.join(INPUT_KINDS)}")
        (kind, path), = source.items()
        chroma = doc.pop("chroma", {}) or {}
        output = doc.pop("output", {}) or {}
        known = {"pipeline", "fps", "rotation_period_s", "mode", "thickness", "eq45_sign",
                 "cm_per_pixel", "slope_window", "angle_window"}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        try:
            chroma_cfg = ChromaKeyConfig(**chroma)
        except TypeError as exc:
            raise ConfigError(f"bad chroma block: {exc}") from None
        return cls(input_kind=kind, input_path=str(path), chroma=chroma_cfg,
                   report=output.get("report", "report.json"), base_dir=base_dir, **doc)

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(doc, base_dir=os.path.dirname(os.path.abspath(path)))

    def override(self, **kwargs):
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


def _acquire(cfg):
    """Masks plus ``(fps, period)`` for the configured input source."""
    path = cfg.resolve(cfg.input_path)
    timing = None
    if cfg.input_kind == "scene":
        spec, meta, dims = load_scene(path)
        masks = render_rotation_sequence(spec, meta, dims)
        timing = (meta.fps, meta.rotation_period)
    elif cfg.input_kind == "masks":
        masks = load_masks(path)
        timing = read_sequence_meta(path)
    else:
        c = cfg.chroma
        seg = ChromaKeySegmenter(c.hue_center, c.hue_tolerance, c.min_saturation, c.min_value)
        masks = seg.fit_transform(load_frames(path))
        timing = read_sequence_meta(path)
    fps = cfg.fps if cfg.fps is not None else (timing[0] if timing else 30.0)
    period = cfg.rotation_period_s if cfg.rotation_period_s is not None else (
        timing[1] if timing else 20.0)
    return masks, fps, period


def run(cfg):
    """Execute ``cfg`` and write its report; returns the report document."""
    masks, fps, period = _acquire(cfg)
    doc = {
        "input": {cfg.input_kind: cfg.input_path},
        "pipeline": cfg.pipeline,
        "n_frames": len(masks),
        "fps": fps,
        "rotation_period_s": period,
    }
    if cfg.pipeline in ("vertical", "both"):
        doc["vertical"] = vertical_section(masks, cfg.cm_per_pixel, cfg.slope_window)
    if cfg.pipeline in ("horizontal", "both"):
        doc["horizontal"] = horizontal_section(masks, fps, period, cfg.mode, cfg.thickness,
                                               cfg.eq45_sign, cfg.cm_per_pixel,
                                               cfg.angle_window)
    write_text_atomic(cfg.resolve(cfg.report), dumps(doc))
    return doc


def synth(scene_path, out_dir, fmt="png", rgb=False):
    spec, meta, dims = load_scene(scene_path)
    masks = render_rotation_sequence(spec, meta, dims)
    seq = meta.to_dict()
    if rgb:
        write_frames([composite_on_green(m) for m in masks], out_dir, seq)
    else:
        write_masks(masks, out_dir, fmt, seq)
    return len(masks)


def segment(in_dir, out_dir, cfg=ChromaKeyConfig(), fmt="png"):
    seg = ChromaKeySegmenter(cfg.hue_center, cfg.hue_tolerance, cfg.min_saturation,
                             cfg.min_value)
    masks = seg.fit_transform(load_frames(in_dir))
    write_masks(masks, out_dir, fmt)
    src = os.path.join(in_dir, SEQUENCE_FILE)
    if os.path.exists(src):
        shutil.copyfile(src, os.path.join(out_dir, SEQUENCE_FILE))
    return len(masks)
