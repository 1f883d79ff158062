"""Green-screen keying, mask cleanup and mask file I/O."""
from dataclasses import dataclass
import os
import tempfile

import cv2
import numpy as np
from PIL import Image
from scipy import ndimage
from sklearn.base import BaseEstimator, TransformerMixin

from .exceptions import ConfigError, EmptyForegroundError, MaskDecodeError, with_frame
from .validation import check_mask, parallel_map

# 4-connectivity for both foreground components and background holes.
FOUR_CONNECTED = ndimage.generate_binary_structure(2, 1)


@dataclass(frozen=True)
class ChromaKeyConfig:
    hue_center: float = 120.0
    hue_tolerance: float = 50.0
    min_saturation: float = 0.25
    min_value: float = 0.20

    def __post_init__(self):
        if not 0.0 <= self.hue_center < 360.0:
            raise ConfigError(f"hue_center must lie in [0, 360), got {self.hue_center}")
        if not 0.0 < self.hue_tolerance <= 180.0:
            raise ConfigError(f"hue_tolerance must lie in (0, 180], got {self.hue_tolerance}")
        for name in ("min_saturation", "min_value"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")


def _to_unit_rgb(frame):
    arr = np.asarray(frame)
    if arr.ndim != 3 or arr.shape[2] not in (3, 4):
        raise ValueError(f"frame must be (H, W, 3) RGB, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError("frame is empty")
    arr = arr[..., :3]
    if np.issubdtype(arr.dtype, np.integer):
        return arr.astype(np.float32) / np.float32(255.0)
    return np.clip(arr.astype(np.float32), 0.0, 1.0)


def background_pixels(frame, cfg=ChromaKeyConfig()):
    """Boolean map of pixels keyed out as green screen (no error on empty)."""
    # float input gives hexcone HSV with hue in degrees, s and v in [0, 1]
    hsv = cv2.cvtColor(np.ascontiguousarray(_to_unit_rgb(frame)), cv2.COLOR_RGB2HSV)
    hue = hsv[..., 0].astype(np.float64)
    dist = np.abs((hue - cfg.hue_center + 180.0) % 360.0 - 180.0)
    return (
        (dist <= cfg.hue_tolerance)
        & (hsv[..., 1] >= cfg.min_saturation)
        & (hsv[..., 2] >= cfg.min_value)
    )


def chroma_key(frame, cfg=ChromaKeyConfig()):
    """Foreground mask of an RGB frame: everything that is not green screen."""
    mask = ~background_pixels(frame, cfg)
    if not mask.any():
        raise EmptyForegroundError("chroma key left no foreground pixels")
    return mask


def cleanup(mask):
    """Keep the largest 4-connected component and fill its holes.

    Ties between equally large components go to the one whose first pixel
    comes first in row-major order.
    """
    mask = check_mask(mask)
    labels, n = ndimage.label(mask, structure=FOUR_CONNECTED)
    if n > 1:
        sizes = np.bincount(labels.ravel())[1:]
        keep = labels == (int(np.argmax(sizes)) + 1)
    else:
        keep = labels == 1
    return ndimage.binary_fill_holes(keep, structure=FOUR_CONNECTED)


def largest_component_size(mask):
    labels, n = ndimage.label(np.asarray(mask, dtype=bool), structure=FOUR_CONNECTED)
    if n == 0:
        return 0
    return int(np.bincount(labels.ravel())[1:].max())


def n_components(mask):
    return ndimage.label(np.asarray(mask, dtype=bool), structure=FOUR_CONNECTED)[1]


def iou(a, b):
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    union = np.logical_or(a, b).sum()
    if union == 0:
        return 1.0
    return float(np.logical_and(a, b).sum() / union)


MASK_SUFFIXES = (".png", ".pgm")


def load_mask(path):
    """Read a single-channel PNG or PGM; nonzero pixels are foreground."""
    try:
        with Image.open(path) as img:
            img.load()
            if img.mode not in ("1", "L", "I", "I;16", "I;16B", "F"):
                raise MaskDecodeError(f"{path}: expected single-channel image, got mode {img.mode}")
            arr = np.asarray(img)
    except MaskDecodeError:
        raise
    except (OSError, ValueError) as exc:
        raise MaskDecodeError(f"cannot decode {path}: {exc}") from None
    if arr.ndim != 2 or 0 in arr.shape:
        raise MaskDecodeError(f"{path}: zero-dimension or non-2-D image {arr.shape}")
    return arr != 0


def _atomic_save(img, path, fmt):
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            img.save(fh, format=fmt)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_mask(mask, path):
    """Write 0/255 8-bit grayscale; format chosen by suffix (.png or .pgm)."""
    mask = check_mask(mask, allow_empty=True)
    suffix = os.path.splitext(os.fspath(path))[1].lower()
    if suffix not in MASK_SUFFIXES:
        raise ConfigError(f"unsupported mask format {suffix!r}; use .png or .pgm")
    img = Image.fromarray(np.where(mask, 255, 0).astype(np.uint8), mode="L")
    _atomic_save(img, path, "PNG" if suffix == ".png" else "PPM")


def load_frame(path):
    """Read an RGB frame as a ``(H, W, 3)`` uint8 array."""
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"))
    except (OSError, ValueError) as exc:
        raise MaskDecodeError(f"cannot decode {path}: {exc}") from None


def save_frame(frame, path):
    _atomic_save(Image.fromarray(np.asarray(frame, dtype=np.uint8), mode="RGB"), path, "PNG")


class ChromaKeySegmenter(TransformerMixin, BaseEstimator):
    """Turn green-screen RGB frames into cleaned single-object masks.

    Stateless: ``fit`` only validates parameters. ``transform`` takes a
    sequence of ``(H, W, 3)`` frames and returns a list of boolean masks.

    Parameters
    ----------
    hue_center, hue_tolerance : float
        Keyed hue window, in degrees.
    min_saturation, min_value : float
        A pixel must reach both to be keyed out as background.
    clean : bool
        Apply :func:`cleanup` to each keyed mask.
    """

    def __init__(self, hue_center=120.0, hue_tolerance=50.0, min_saturation=0.25,
                 min_value=0.20, clean=True):
        self.hue_center = hue_center
        self.hue_tolerance = hue_tolerance
        self.min_saturation = min_saturation
        self.min_value = min_value
        self.clean = clean

    def _config(self):
        return ChromaKeyConfig(self.hue_center, self.hue_tolerance,
                               self.min_saturation, self.min_value)

    def fit(self, X=None, y=None):
        self.config_ = self._config()
        return self

    def transform(self, X):
        cfg = self._config()

        def one(item):
            i, frame = item
            try:
                mask = chroma_key(frame, cfg)
                return cleanup(mask) if self.clean else mask
            except EmptyForegroundError as exc:
                raise with_frame(exc, i) from None

        return parallel_map(one, enumerate(X))
