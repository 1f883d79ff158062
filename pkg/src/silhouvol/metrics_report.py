"""Error metrics, unit conversion and comparison reports."""
from dataclasses import dataclass, field
import csv
import io
import json
import math
import os
import statistics
import tempfile

import numpy as np

from .exceptions import ConfigError

HORIZONTAL_MODES = ("short", "average", "long")


def ellipsoid_volume(a, b, c):
    """Volume of an ellipsoid from its full axis lengths."""
    for name, v in (("a", a), ("b", b), ("c", c)):
        if not v > 0:
            raise ValueError(f"axis {name} must be positive, got {v}")
    return math.pi / 6.0 * a * b * c


def percent_error(estimate, reference):
    if not reference > 0:
        raise ValueError(f"reference must be positive, got {reference}")
    return 100.0 * abs(estimate - reference) / reference


def mae(errors):
    errors = np.asarray(errors, dtype=float)
    if errors.size == 0:
        raise ValueError("mae of an empty list")
    return statistics.fmean(np.abs(errors).tolist())


def population_std(values):
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("std of an empty list")
    return statistics.pstdev(values.tolist())


def sample_std(values):
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise ValueError("sample std needs at least 2 values")
    return statistics.stdev(values.tolist())


def standard_error(values):
    """Population standard deviation divided by sqrt(n)."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise ValueError("standard error needs at least 2 values")
    return population_std(values) / math.sqrt(values.size)


@dataclass(frozen=True)
class ScaleCalibration:
    cm_per_pixel: float

    def __post_init__(self):
        if not (isinstance(self.cm_per_pixel, (int, float)) and self.cm_per_pixel > 0):
            raise ConfigError(f"cm_per_pixel must be > 0, got {self.cm_per_pixel!r}")

    def convert(self, value, power):
        return to_physical(value, self, power)


def to_physical(value, scale, power):
    """Convert a length (1), area (2) or volume (3) from pixels to cm."""
    if power not in (1, 2, 3):
        raise ValueError(f"power must be 1, 2 or 3, got {power}")
    return value * scale.cm_per_pixel**power


@dataclass
class MeasurementRecord:
    """One sample: reference volume and the estimates compared against it.

    Error fields left as ``None`` are computed with :func:`percent_error`.
    Supplied errors are kept as given, so published tables reproduce
    their own summary rows.
    """

    sample_id: str
    manual_volume: float
    vertical_volume: float = None
    horizontal_volumes: dict = field(default_factory=dict)
    vertical_error: float = None
    horizontal_errors: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.manual_volume > 0:
            raise ConfigError(f"sample {self.sample_id}: manual volume must be > 0")
        if self.vertical_volume is not None and self.vertical_error is None:
            self.vertical_error = percent_error(self.vertical_volume, self.manual_volume)
        for mode in self.horizontal_volumes:
            if mode not in HORIZONTAL_MODES:
                raise ConfigError(f"sample {self.sample_id}: unknown horizontal mode {mode!r}")
        errs = dict(self.horizontal_errors)
        for mode, vol in self.horizontal_volumes.items():
            if errs.get(mode) is None:
                errs[mode] = percent_error(vol, self.manual_volume)
        self.horizontal_errors = {m: errs[m] for m in HORIZONTAL_MODES if m in errs}
        self.horizontal_volumes = {m: self.horizontal_volumes[m] for m in HORIZONTAL_MODES
                                   if m in self.horizontal_volumes}

    @classmethod
    def from_dict(cls, doc):
        """Parse a report-style sample row.

        ``horizontal_cm3`` may be a single number, read as the average mode.
        """
        try:
            h_vol = doc.get("horizontal_cm3") or {}
            h_err = doc.get("horizontal_err_pct") or {}
            if not isinstance(h_vol, dict):
                h_vol = {"average": h_vol}
            if not isinstance(h_err, dict):
                h_err = {"average": h_err}
            return cls(
                sample_id=str(doc["id"]),
                manual_volume=float(doc["manual_cm3"]),
                vertical_volume=_opt_float(doc.get("vertical_cm3")),
                horizontal_volumes={k: float(v) for k, v in h_vol.items()},
                vertical_error=_opt_float(doc.get("vertical_err_pct")),
                horizontal_errors={k: float(v) for k, v in h_err.items()},
            )
        except KeyError as exc:
            raise ConfigError(f"sample row is missing {exc}") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad sample row {doc!r}: {exc}") from None

    def to_dict(self):
        return {
            "id": self.sample_id,
            "manual_cm3": self.manual_volume,
            "vertical_cm3": self.vertical_volume,
            "vertical_err_pct": self.vertical_error,
            "horizontal_cm3": dict(self.horizontal_volumes),
            "horizontal_err_pct": dict(self.horizontal_errors),
        }


def _opt_float(v):
    return None if v is None else float(v)


def _mean(values):
    return statistics.fmean(values) if len(values) else None


def _pop_std(values):
    return statistics.pstdev(values) if len(values) else None


def emit_report(records, horizontal_mode="average"):
    """Per-sample rows plus mean and population-σ summary rows.

    The summary depends only on the set of records, not their order.
    ``mae_horizontal`` uses ``horizontal_mode``; every mode is also given
    under ``mae_horizontal_by_mode``.
    """
    records = list(records)
    if not records:
        raise ValueError("report needs at least one record")
    manual = [r.manual_volume for r in records]
    vert = [r.vertical_volume for r in records if r.vertical_volume is not None]
    vert_err = [r.vertical_error for r in records if r.vertical_error is not None]
    by_mode_vol = {m: [r.horizontal_volumes[m] for r in records if m in r.horizontal_volumes]
                   for m in HORIZONTAL_MODES}
    by_mode_err = {m: [r.horizontal_errors[m] for r in records if m in r.horizontal_errors]
                   for m in HORIZONTAL_MODES}
    h_err = by_mode_err[horizontal_mode]
    summary = {
        "n": len(records),
        "mean_manual": _mean(manual),
        "mean_vertical": _mean(vert),
        "mean_horizontal": _mean(by_mode_vol[horizontal_mode]),
        "mae_vertical": mae(vert_err) if vert_err else None,
        "mae_horizontal": mae(h_err) if h_err else None,
        "mae_horizontal_by_mode": {m: mae(e) for m, e in by_mode_err.items() if e},
        "sigma_manual_population": _pop_std(manual),
        "sigma_manual_sample": sample_std(manual) if len(manual) > 1 else None,
        "se_manual": standard_error(manual) if len(manual) > 1 else 0.0,
        "sigma_vertical": _pop_std(vert),
        "sigma_vertical_err": _pop_std(vert_err),
        "sigma_horizontal": _pop_std(by_mode_vol[horizontal_mode]),
        "sigma_horizontal_err": _pop_std(h_err),
        "horizontal_mode": horizontal_mode,
    }
    return {
        "samples": [r.to_dict() for r in records],
        "summary": summary,
    }


def scatter_rows(records, horizontal_mode="average"):
    """``(sample_id, manual, predicted, method)`` rows for a scatter plot."""
    rows = []
    for r in records:
        if r.vertical_volume is not None:
            rows.append((r.sample_id, r.manual_volume, r.vertical_volume, "vertical"))
        if horizontal_mode in r.horizontal_volumes:
            rows.append((r.sample_id, r.manual_volume, r.horizontal_volumes[horizontal_mode],
                         "horizontal"))
    return rows


def scatter_csv(records, horizontal_mode="average"):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["sample_id", "manual", "predicted", "method"])
    writer.writerows(scatter_rows(records, horizontal_mode))
    return buf.getvalue()


def dumps(doc):
    """Canonical JSON text used for every report file."""
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write_text_atomic(path, text):
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_records(path):
    """Read sample rows from a JSON file (a list, or a report with ``samples``)."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from None
    rows = doc["samples"] if isinstance(doc, dict) and "samples" in doc else doc
    if not isinstance(rows, list):
        raise ConfigError(f"{path}: expected a list of sample rows")
    return [MeasurementRecord.from_dict(row) for row in rows]
