"""Input validation helpers shared by the estimators."""
import numbers
import os

import numpy as np

from .exceptions import ConfigError, EmptyForegroundError


def check_mask(mask, *, allow_empty=False, name="mask"):
    """Coerce ``mask`` to a 2-D boolean array.

    Nonzero entries become foreground. Raises ``ValueError`` on wrong
    dimensionality and :class:`EmptyForegroundError` on an all-background
    mask unless ``allow_empty``.
    """
    arr = np.asarray(mask)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"{name} has a zero dimension: {arr.shape}")
    arr = arr.astype(bool, copy=False)
    if not allow_empty and not arr.any():
        raise EmptyForegroundError(f"{name} has no foreground pixels")
    return arr


def check_mask_sequence(masks, *, min_frames=1):
    """Validate an ordered collection of masks; returns a list of bool arrays.

    A 3-D array is treated as ``(n_frames, height, width)``.
    """
    seq = list(masks)
    if len(seq) < min_frames:
        raise ValueError(f"need at least {min_frames} frame(s), got {len(seq)}")
    out = []
    for i, m in enumerate(seq):
        try:
            out.append(check_mask(m, allow_empty=True, name=f"frame {i}"))
        except ValueError as exc:
            raise ValueError(f"frame {i}: {exc}") from None
    return out


def check_positive(value, name, *, strict=True):
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    if strict and not value > 0:
        raise ConfigError(f"{name} must be > 0, got {value!r}")
    if not strict and value < 0:
        raise ConfigError(f"{name} must be >= 0, got {value!r}")
    return float(value)


def check_choice(value, name, choices):
    if value not in choices:
        raise ConfigError(f"{name} must be one of {sorted(choices)}, got {value!r}")
    return value


def max_workers():
    """Thread cap from ``SILHOUVOL_THREADS``; defaults to 1 (serial)."""
    raw = os.environ.get("SILHOUVOL_THREADS")
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"SILHOUVOL_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def parallel_map(func, items):
    """Map ``func`` over ``items`` in input order, threaded per ``max_workers``."""
    items = list(items)
    n = max_workers()
    if n == 1 or len(items) < 2:
        return [func(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(func, items))
