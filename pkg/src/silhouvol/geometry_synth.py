"""Synthetic turntable scenes with analytic ground truth.

Solids are ellipsoids viewed by an orthographic camera looking along the
world z axis. The turntable spins about the world (image) vertical axis.
Image rows grow downward; pixel ``(row, col)`` has its center at
``(col + 0.5, row + 0.5)``.
"""
from dataclasses import dataclass
import json
import math

import numpy as np

from .exceptions import ConfigError, SilhouetteOutOfBoundsError
from .validation import check_choice, check_positive

KINDS = ("spheroid", "triaxial-ellipsoid")
ORIENTATIONS = ("vertical-long-axis", "horizontal-long-axis")
THOMSEN_P = 1.6075


@dataclass(frozen=True)
class SolidSpec:
    """An ellipsoid on the turntable.

    ``full_axes`` are full axis lengths (diameters) in pixels. The
    orientation decides where they go in the world frame at angle 0:
    the longest axis is put on the vertical (``vertical-long-axis``) or on
    the image x axis (``horizontal-long-axis``); the remaining two fill the
    free world axes in x, y, z order, keeping the order they were given in.
    """

    kind: str = "triaxial-ellipsoid"
    full_axes: tuple = (200.0, 200.0, 200.0)
    orientation: str = "vertical-long-axis"
    center_offset: tuple = (0.0, 0.0)

    def __post_init__(self):
        check_choice(self.kind, "kind", KINDS)
        check_choice(self.orientation, "orientation", ORIENTATIONS)
        axes = tuple(float(check_positive(a, "axis")) for a in self.full_axes)
        if len(axes) != 3:
            raise ConfigError(f"full_axes needs 3 values, got {len(axes)}")
        if self.kind == "spheroid" and len(set(axes)) > 2:
            raise ConfigError(f"a spheroid needs two equal axes, got {axes}")
        offset = tuple(float(v) for v in self.center_offset)
        if len(offset) != 2:
            raise ConfigError("center_offset needs 2 values")
        object.__setattr__(self, "full_axes", axes)
        object.__setattr__(self, "center_offset", offset)

    def world_semi_axes(self):
        """Semi-axes ``(a_x, a_y, a_z)`` in the world frame at angle 0."""
        axes = list(self.full_axes)
        k = int(np.argmax(axes))
        longest = axes.pop(k)
        if self.orientation == "vertical-long-axis":
            world = (axes[0], longest, axes[1])
        else:
            world = (longest, axes[0], axes[1])
        return tuple(v / 2.0 for v in world)

    def scaled(self, factor):
        return SolidSpec(
            kind=self.kind,
            full_axes=tuple(a * factor for a in self.full_axes),
            orientation=self.orientation,
            center_offset=tuple(c * factor for c in self.center_offset),
        )


@dataclass(frozen=True)
class FrameSequenceMeta:
    fps: float = 30.0
    rotation_period: float = 20.0
    n_frames: int = 600
    projection: str = "orthographic"

    def __post_init__(self):
        check_positive(self.fps, "fps")
        check_positive(self.rotation_period, "rotation_period")
        if not isinstance(self.n_frames, (int, np.integer)) or self.n_frames < 2:
            raise ConfigError(f"n_frames must be an integer >= 2, got {self.n_frames!r}")
        check_choice(self.projection, "projection", ("orthographic",))

    @property
    def angle_step(self):
        """Turntable rotation between consecutive frames, in radians."""
        return 2.0 * math.pi / (self.fps * self.rotation_period)

    def angles(self):
        return self.angle_step * np.arange(self.n_frames)

    def to_dict(self):
        return {
            "fps": self.fps,
            "rotation_period_s": self.rotation_period,
            "n_frames": int(self.n_frames),
            "projection": self.projection,
        }


def projected_ellipse(spec, angle):
    """Image-plane ellipse of the solid turned by ``angle`` about the vertical.

    Returns the 2x2 matrix ``P`` such that a point ``d`` (offset from the
    center, x then y) is inside the silhouette iff ``d @ inv(P) @ d <= 1``.
    ``P`` is the x/y block of the inverse quadric ``R diag(a^2) R^T``.
    """
    a = np.asarray(spec.world_semi_axes())
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
    inv_quadric = rot @ np.diag(a**2) @ rot.T
    return inv_quadric[:2, :2]


def render_silhouette(spec, angle, dims):
    """Binary silhouette mask of shape ``(height, width)`` for one angle."""
    width, height = (int(d) for d in dims)
    if width <= 0 or height <= 0:
        raise ConfigError(f"dims must be positive, got {dims}")
    proj = projected_ellipse(spec, angle)
    cx = width / 2.0 + spec.center_offset[0]
    cy = height / 2.0 + spec.center_offset[1]
    half_w = math.sqrt(proj[0, 0])
    half_h = math.sqrt(proj[1, 1])
    if cx - half_w < 0 or cx + half_w > width or cy - half_h < 0 or cy + half_h > height:
        raise SilhouetteOutOfBoundsError(
            f"silhouette extent x[{cx - half_w:.1f}, {cx + half_w:.1f}] "
            f"y[{cy - half_h:.1f}, {cy + half_h:.1f}] exceeds image {width}x{height}"
        )
    q = np.linalg.inv(proj)
    dx = np.arange(width) + 0.5 - cx
    dy = (np.arange(height) + 0.5 - cy)[:, None]
    value = q[0, 0] * dx**2 + 2.0 * q[0, 1] * dx * dy + q[1, 1] * dy**2
    return value <= 1.0


def render_rotation_sequence(spec, meta, dims):
    """Render every frame of ``meta``; frame k is at angle 2πk/(fps·period)."""
    from .validation import parallel_map

    return parallel_map(lambda t: render_silhouette(spec, t, dims), meta.angles())


def analytic_volume(spec):
    a, b, c = spec.full_axes
    return math.pi / 6.0 * a * b * c


def thomsen_surface_area(spec):
    """Knud Thomsen's closed-form approximation of the ellipsoid surface."""
    a, b, c = (v / 2.0 for v in spec.full_axes)
    p = THOMSEN_P
    mean = ((a * b) ** p + (a * c) ** p + (b * c) ** p) / 3.0
    return 4.0 * math.pi * mean ** (1.0 / p)


def load_scene(path):
    """Read a scene JSON file into ``(SolidSpec, FrameSequenceMeta, dims)``."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read scene file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scene file {path} is not valid JSON: {exc}") from None
    return scene_from_dict(doc)


def scene_from_dict(doc):
    try:
        spec = SolidSpec(
            kind=doc.get("kind", "triaxial-ellipsoid"),
            full_axes=tuple(doc["full_axes"]),
            orientation=doc.get("orientation", "vertical-long-axis"),
            center_offset=tuple(doc.get("center_offset", (0.0, 0.0))),
        )
        meta = FrameSequenceMeta(
            fps=doc.get("fps", 30.0),
            rotation_period=doc.get("rotation_period_s", 20.0),
            n_frames=doc.get("n_frames", 600),
        )
        dims = tuple(int(v) for v in doc["dims"])
    except KeyError as exc:
        raise ConfigError(f"scene is missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid scene: {exc}") from None
    if len(dims) != 2:
        raise ConfigError("dims needs [width, height]")
    return spec, meta, dims


# Flesh tone on chroma green, 8-bit RGB.
FLESH_RGB = (226, 160, 140)
GREEN_RGB = (30, 190, 60)


def composite_on_green(mask, foreground=FLESH_RGB, background=GREEN_RGB):
    """Paint a mask as an RGB green-screen frame."""
    mask = np.asarray(mask, dtype=bool)
    frame = np.empty(mask.shape + (3,), dtype=np.uint8)
    frame[...] = background
    frame[mask] = foreground
    return frame
