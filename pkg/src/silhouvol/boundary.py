"""Per-row geometry of a single-object mask.

Coordinates are pixel indices: ``x`` is the column, ``y`` the row,
growing downward, so the extreme point ``m`` is the topmost one.
"""
from dataclasses import dataclass
import csv

import numpy as np

from .exceptions import MissingRowError, TooThinError
from .validation import check_mask


@dataclass(frozen=True)
class BoundaryProfile:
    y: np.ndarray
    x_left: np.ndarray
    x_right: np.ndarray
    m: tuple
    M: tuple

    @property
    def axis_x(self):
        return (self.m[0] + self.M[0]) / 2.0

    @property
    def H(self):
        """Length in rows of the central-and-vertical line."""
        return int(self.M[1] - self.m[1] + 1)

    @property
    def center(self):
        return (self.axis_x, (self.m[1] + self.M[1]) / 2.0)

    @property
    def widths(self):
        return width_column(self)

    def mirrored(self, image_width):
        """Profile of the left-right flipped mask."""
        last = image_width - 1
        return BoundaryProfile(
            y=self.y,
            x_left=last - self.x_right,
            x_right=last - self.x_left,
            m=(last - self.m[0], self.m[1]),
            M=(last - self.M[0], self.M[1]),
        )


@dataclass(frozen=True)
class RadiusProfile:
    y: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        r = np.asarray(self.r, dtype=float)
        if y.shape != r.shape or y.ndim != 1:
            raise ValueError("y and r must be 1-D arrays of equal length")
        if np.any(r < 0):
            raise ValueError("radii must be nonnegative")
        if len(y) > 1 and np.any(np.diff(y) <= 0):
            raise ValueError("y must be strictly increasing")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "r", r)

    def __len__(self):
        return len(self.y)


def extract_profile(mask):
    """Row extents and extreme points of a cleaned mask.

    Rows with several foreground runs use their outermost columns. When
    several pixels share the extreme row, ``m``/``M`` take their mean column.
    """
    mask = check_mask(mask)
    occupied = np.flatnonzero(mask.any(axis=1))
    top, bottom = int(occupied[0]), int(occupied[-1])
    if len(occupied) != bottom - top + 1:
        gaps = sorted(set(range(top, bottom + 1)) - set(occupied.tolist()))
        raise MissingRowError(f"rows {gaps[:5]} inside the object are empty")
    if bottom - top + 1 < 3:
        raise TooThinError(f"object spans {bottom - top + 1} row(s); need at least 3")
    rows = mask[top:bottom + 1]
    width = mask.shape[1]
    x_left = np.argmax(rows, axis=1)
    x_right = width - 1 - np.argmax(rows[:, ::-1], axis=1)
    m = (float(np.flatnonzero(rows[0]).mean()), top)
    M = (float(np.flatnonzero(rows[-1]).mean()), bottom)
    return BoundaryProfile(
        y=np.arange(top, bottom + 1),
        x_left=x_left,
        x_right=x_right,
        m=m,
        M=M,
    )


def width_column(profile):
    """Inclusive pixel width of every row, top to bottom (slices j = 1..H)."""
    return (profile.x_right - profile.x_left + 1).astype(float)


def radius_profile(profile):
    """Distance of the averaged boundary curve to the rotation axis, per row.

    The boundary runs along the outer pixel edges, so the radius is half the
    inclusive width: ``(x_right + 0.5 - (x_left - 0.5)) / 2``.
    """
    return RadiusProfile(y=profile.y.astype(float), r=width_column(profile) / 2.0)


def dump_profile_csv(profile, path):
    """Debug dump with columns ``y, x_left, x_right, r``."""
    r = radius_profile(profile).r
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["y", "x_left", "x_right", "r"])
        for row in zip(profile.y.tolist(), profile.x_left.tolist(),
                       profile.x_right.tolist(), r.tolist()):
            writer.writerow(row)
