"""Volume and surface area of turntable objects from silhouette sequences."""
from .boundary import BoundaryProfile, RadiusProfile, extract_profile, radius_profile, width_column
from .geometry_synth import (
    FrameSequenceMeta,
    SolidSpec,
    analytic_volume,
    render_rotation_sequence,
    render_silhouette,
    thomsen_surface_area,
)
from .metrics_report import (
    MeasurementRecord,
    ScaleCalibration,
    ellipsoid_volume,
    emit_report,
    mae,
    percent_error,
    standard_error,
    to_physical,
)
from .revolve_vertical import (
    RevolveEstimate,
    VerticalRevolveEstimator,
    estimate_vertical,
    surface_of_revolution,
    volume_of_revolution,
)
from .segmentation import ChromaKeyConfig, ChromaKeySegmenter, chroma_key, cleanup, load_mask, save_mask
from .slice_horizontal import (
    HorizontalEstimate,
    HorizontalSliceEstimator,
    WidthMatrix,
    calibrate,
    estimate_horizontal,
    slice_area,
    width_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryProfile",
    "RadiusProfile",
    "extract_profile",
    "radius_profile",
    "width_column",
    "FrameSequenceMeta",
    "SolidSpec",
    "analytic_volume",
    "render_rotation_sequence",
    "render_silhouette",
    "thomsen_surface_area",
    "MeasurementRecord",
    "ScaleCalibration",
    "ellipsoid_volume",
    "emit_report",
    "mae",
    "percent_error",
    "standard_error",
    "to_physical",
    "RevolveEstimate",
    "VerticalRevolveEstimator",
    "estimate_vertical",
    "surface_of_revolution",
    "volume_of_revolution",
    "ChromaKeyConfig",
    "ChromaKeySegmenter",
    "chroma_key",
    "cleanup",
    "load_mask",
    "save_mask",
    "HorizontalEstimate",
    "HorizontalSliceEstimator",
    "WidthMatrix",
    "calibrate",
    "estimate_horizontal",
    "slice_area",
    "width_matrix",
]
