"""Slice-sum volume estimator for objects lying on the turntable.

The object is cut into horizontal slices. Across the turntable sequence,
the visible width of a slice traces its width function over angle, and
the slice area follows from the integral-geometry formula for convex
bodies. Frames are first rescaled so that their central vertical lines
share one length (shortest, average or longest over the sequence).
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.signal import savgol_filter
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .boundary import extract_profile, width_column
from .exceptions import (
    DegenerateCalibrationError,
    InsufficientCoverageError,
    NegativeAreaError,
    SilhouvolError,
    with_frame,
)
from .geometry_synth import FrameSequenceMeta
from .validation import check_choice, check_mask_sequence, check_positive, parallel_map

MODES = ("short", "average", "long")
SIGNS = ("minus", "plus")


@dataclass(frozen=True)
class HeightCalibration:
    H_short: int
    H_avg: int
    H_long: int
    per_frame_scale: list
    mode: str
    heights: list = field(default_factory=list)

    @property
    def H_target(self):
        return {"short": self.H_short, "average": self.H_avg, "long": self.H_long}[self.mode]


@dataclass(frozen=True)
class WidthMatrix:
    """Widths ``L[i, j]`` per folded angle ``i`` and calibrated row ``j``."""

    L: np.ndarray
    angles: np.ndarray
    delta_s: float

    @property
    def n_slices(self):
        return self.L.shape[1]

    def at(self, position):
        """Width column at a calibrated height ``position`` (rows from the top)."""
        u = min(max(position - 0.5, 0.0), self.n_slices - 1.0)
        lo = int(math.floor(u))
        hi = min(lo + 1, self.n_slices - 1)
        frac = u - lo
        return (1.0 - frac) * self.L[:, lo] + frac * self.L[:, hi]


def calibrate(profiles, mode="average"):
    check_choice(mode, "mode", MODES)
    if len(profiles) < 2:
        raise ValueError(f"calibration needs at least 2 frames, got {len(profiles)}")
    heights = np.array([p.H for p in profiles], dtype=float)
    if np.all(heights <= 0):
        raise DegenerateCalibrationError("every frame has zero height")
    if np.any(heights <= 0):
        bad = int(np.flatnonzero(heights <= 0)[0])
        raise DegenerateCalibrationError("zero height", frame=bad)
    h_short = int(heights.min())
    h_long = int(heights.max())
    h_avg = int(math.floor(heights.mean() + 0.5))
    target = {"short": h_short, "average": h_avg, "long": h_long}[mode]
    return HeightCalibration(
        H_short=h_short,
        H_avg=h_avg,
        H_long=h_long,
        per_frame_scale=[(i, target / h) for i, h in enumerate(heights)],
        mode=mode,
        heights=heights.astype(int).tolist(),
    )


def resample_widths(widths, scale, n_target):
    """Rescale one frame's width column by ``scale`` onto ``n_target`` rows.

    Target row ``j`` (center ``j - 0.5``) reads the source at
    ``(j - 0.5) / scale``, linearly interpolated and clamped at the ends.
    """
    widths = np.asarray(widths, dtype=float)
    src_centers = np.arange(len(widths)) + 0.5
    positions = (np.arange(n_target) + 0.5) / scale
    return np.interp(positions, src_centers, widths * scale)


def fold_angles(n_frames, angle_step):
    """Bin index in ``[0, M)`` of every frame after folding angles mod π."""
    if n_frames * angle_step < math.pi - 1e-9:
        raise InsufficientCoverageError(
            f"{n_frames} frames at {angle_step:.6g} rad/frame cover "
            f"{n_frames * angle_step:.6g} rad; need at least π"
        )
    n_bins = int(round(math.pi / angle_step))
    bins = np.rint(np.arange(n_frames) * angle_step / (math.pi / n_bins)).astype(int) % n_bins
    return bins, n_bins


def width_matrix(profiles, cal, meta):
    """Calibrated, angle-folded width matrix of a frame sequence.

    Frames more than half a turn in are folded onto ``[0, π)`` and
    averaged with the frames they coincide with.
    """
    bins, n_bins = fold_angles(len(profiles), meta.angle_step)
    n_target = cal.H_target
    acc = np.zeros((n_bins, n_target))
    counts = np.zeros(n_bins, dtype=int)
    for (i, scale), prof, b in zip(cal.per_frame_scale, profiles, bins):
        acc[b] += resample_widths(width_column(prof), scale, n_target)
        counts[b] += 1
    if np.any(counts == 0):
        missing = int(np.flatnonzero(counts == 0)[0])
        raise InsufficientCoverageError(f"no frame falls in angle bin {missing} of {n_bins}")
    delta_s = math.pi / n_bins
    return WidthMatrix(L=acc / counts[:, None], angles=np.arange(n_bins) * delta_s, delta_s=delta_s)


def angle_window_samples(angle_window, delta_s, n_samples):
    """Odd Savitzky-Golay window (in samples) spanning ``angle_window`` radians."""
    if not angle_window:
        return 1
    win = int(round(angle_window / delta_s)) // 2 * 2 + 1
    if win > n_samples:
        win = n_samples if n_samples % 2 else n_samples - 1
    return win if win >= 5 else 1


def slice_area(widths, sign="minus", smooth_window=1):
    """Area of a convex slice from its widths at ``M`` uniform angles over [0, π).

    ``A = 1/4 Σ (L² ∓ L'²) Δs`` with L' from periodic central differences.
    The ``minus`` form is the exact area of a centrally symmetric convex
    body; ``plus`` reproduces the printed variant and overestimates.

    ``smooth_window`` (odd, in samples) takes L' from a periodic quadratic
    Savitzky-Golay fit instead of the raw samples. Pixel-quantised widths
    need this: difference noise grows as 1/Δs and biases the minus form low.
    """
    check_choice(sign, "sign", SIGNS)
    L = np.asarray(widths, dtype=float)
    if L.ndim != 1 or len(L) < 8:
        raise ValueError(f"need at least 8 width samples, got {L.shape}")
    if np.any(L < 0):
        raise ValueError("widths must be nonnegative")
    ds = math.pi / len(L)
    Ld = L
    if smooth_window > 1:
        Ld = savgol_filter(L, smooth_window, 2, mode="wrap")
    dL = (np.roll(Ld, -1) - np.roll(Ld, 1)) / (2.0 * ds)
    a2 = np.sum(L**2)
    d2 = np.sum(dL**2)
    area = 0.25 * (a2 - d2 if sign == "minus" else a2 + d2) * ds
    if area < 0:
        raise NegativeAreaError(f"slice area came out negative ({area:.6g})")
    return float(area)


def slice_positions(height, thickness):
    """Centers and thicknesses of slices of ``thickness`` stacked over ``height``."""
    n = max(1, math.ceil(height / thickness - 1e-9))
    lo = np.arange(n) * thickness
    hi = np.minimum(lo + thickness, height)
    return 0.5 * (lo + hi), hi - lo


def _volume_for_mode(profiles, meta, mode, thickness, sign, angle_window):
    cal = calibrate(profiles, mode)
    wm = width_matrix(profiles, cal, meta)
    window = angle_window_samples(angle_window, wm.delta_s, len(wm.angles))
    centers, thick = slice_positions(cal.H_target, thickness)
    areas = []
    diagnostics = []
    for j, (c, t) in enumerate(zip(centers, thick)):
        try:
            areas.append(slice_area(wm.at(c), sign, window))
        except NegativeAreaError as exc:
            areas.append(0.0)
            diagnostics.append({"mode": mode, "slice": j, "message": str(exc)})
    areas = np.array(areas)
    return float(np.sum(areas * thick)), areas, centers, thick, cal, diagnostics


@dataclass(frozen=True)
class HorizontalEstimate:
    mode: str
    volume: float
    volumes: dict
    slice_areas: np.ndarray
    slice_centers: np.ndarray
    slice_thickness: np.ndarray
    calibration: HeightCalibration
    diagnostics: list

    def to_dict(self):
        cal = self.calibration
        return {
            "mode": self.mode,
            "volume_px3": self.volume,
            "volumes_px3": dict(self.volumes),
            "calibration": {
                "H_short": cal.H_short,
                "H_avg": cal.H_avg,
                "H_long": cal.H_long,
                "heights": list(cal.heights),
            },
            "slices": [
                {"index": j, "center": float(c), "thickness": float(t), "area_px2": float(a)}
                for j, (c, t, a) in enumerate(zip(self.slice_centers, self.slice_thickness,
                                                  self.slice_areas))
            ],
            "diagnostics": list(self.diagnostics),
        }


def frame_profiles(frames):
    def one(item):
        i, mask = item
        try:
            return extract_profile(mask)
        except SilhouvolError as exc:
            raise with_frame(exc, i) from None

    return parallel_map(one, enumerate(frames))


def estimate_horizontal(frames, meta, mode="average", thickness=1.0, sign="minus",
                        angle_window=0.3):
    """Slice-summed volume under all three calibrations.

    Frame angles come from ``meta.angle_step`` and the frame index; the
    number of frames is taken from ``frames``. ``angle_window`` (radians)
    sets the smoothing span for the width derivative; 0 disables it. Slices whose minus-form area
    comes out negative are counted as zero and reported in ``diagnostics``.
    """
    check_choice(mode, "mode", MODES)
    check_choice(sign, "sign", SIGNS)
    thickness = check_positive(thickness, "thickness")
    if thickness < 1:
        raise ValueError(f"thickness must be at least 1 px, got {thickness}")
    frames = check_mask_sequence(frames, min_frames=2)
    profiles = frame_profiles(frames)
    volumes = {}
    chosen = None
    diagnostics = []
    for m in MODES:
        vol, areas, centers, thick, cal, diag = _volume_for_mode(profiles, meta, m, thickness, sign,
                                                            angle_window)
        volumes[m] = vol
        diagnostics.extend(diag)
        if m == mode:
            chosen = (vol, areas, centers, thick, cal)
    vol, areas, centers, thick, cal = chosen
    return HorizontalEstimate(
        mode=mode,
        volume=vol,
        volumes=volumes,
        slice_areas=areas,
        slice_centers=centers,
        slice_thickness=thick,
        calibration=cal,
        diagnostics=diagnostics,
    )


class HorizontalSliceEstimator(BaseEstimator):
    """Volume of an object lying on the turntable, from its silhouettes.

    Parameters
    ----------
    fps : float
        Frame rate of the sequence.
    rotation_period : float
        Seconds per turntable revolution.
    mode : {"short", "average", "long"}
        Height calibration reported as ``volume_``.
    thickness : float
        Slice thickness in calibrated pixels (>= 1).
    eq45_sign : {"minus", "plus"}
        Sign in front of the squared width derivative.
    angle_window : float
        Smoothing span (radians) for the width derivative; 0 disables it.
    cm_per_pixel : float or None
        Optional physical scale.

    Attributes
    ----------
    estimate_ : HorizontalEstimate
    volume_ : float
    volumes_ : dict
        Volume per calibration mode (px^3).
    """

    def __init__(self, fps=30.0, rotation_period=20.0, mode="average", thickness=1.0,
                 eq45_sign="minus", angle_window=0.3, cm_per_pixel=None):
        self.fps = fps
        self.rotation_period = rotation_period
        self.mode = mode
        self.thickness = thickness
        self.eq45_sign = eq45_sign
        self.angle_window = angle_window
        self.cm_per_pixel = cm_per_pixel

    def fit(self, X, y=None):
        frames = check_mask_sequence(X, min_frames=2)
        meta = FrameSequenceMeta(fps=self.fps, rotation_period=self.rotation_period,
                                 n_frames=len(frames))
        self.estimate_ = estimate_horizontal(frames, meta, self.mode, self.thickness,
                                             self.eq45_sign, self.angle_window)
        self.volume_ = self.estimate_.volume
        self.volumes_ = dict(self.estimate_.volumes)
        if self.cm_per_pixel is not None:
            from .metrics_report import ScaleCalibration

            scale = ScaleCalibration(self.cm_per_pixel)
            self.volume_cm3_ = scale.convert(self.volume_, 3)
            self.volumes_cm3_ = {k: scale.convert(v, 3) for k, v in self.volumes_.items()}
        return self

    def predict(self, X):
        """Volume (px^3) of each mask sequence in ``X`` under ``mode``."""
        out = []
        for seq in X:
            frames = check_mask_sequence(seq, min_frames=2)
            meta = FrameSequenceMeta(self.fps, self.rotation_period, len(frames))
            out.append(estimate_horizontal(frames, meta, self.mode, self.thickness,
                                           self.eq45_sign, self.angle_window).volume)
        return np.array(out)

    def report(self):
        check_is_fitted(self, "estimate_")
        doc = self.estimate_.to_dict()
        doc["fps"] = self.fps
        doc["rotation_period_s"] = self.rotation_period
        doc["thickness_px"] = self.thickness
        doc["eq45_sign"] = self.eq45_sign
        doc["angle_window_rad"] = self.angle_window
        if self.cm_per_pixel is not None:
            doc["cm_per_pixel"] = self.cm_per_pixel
            doc["volume_cm3"] = self.volume_cm3_
            doc["volumes_cm3"] = self.volumes_cm3_
        return doc
