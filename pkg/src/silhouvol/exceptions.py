"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command line, and
optionally the index of the frame or slice it concerns.
"""


class SilhouvolError(Exception):
    """Base class for all package errors."""

    exit_code = 1

    def __init__(self, message, *, frame=None, slice_index=None):
        self.frame = frame
        self.slice_index = slice_index
        context = []
        if frame is not None:
            context.append(f"frame {frame}")
        if slice_index is not None:
            context.append(f"slice {slice_index}")
        if context:
            message = f"{', '.join(context)}: {message}"
        super().__init__(message)


class ConfigError(SilhouvolError, ValueError):
    exit_code = 2


class SegmentationError(SilhouvolError):
    exit_code = 3


class EmptyForegroundError(SegmentationError):
    """The mask (or keyed frame) holds no foreground pixel."""


class MaskDecodeError(SegmentationError):
    """An image file could not be read as a single-channel mask."""


class GeometryError(SilhouvolError):
    exit_code = 4


class SilhouetteOutOfBoundsError(GeometryError):
    pass


class TooThinError(GeometryError):
    pass


class MissingRowError(GeometryError):
    """A row between the top and bottom of the object has no foreground."""


class InsufficientCoverageError(GeometryError):
    pass


class DegenerateCalibrationError(GeometryError):
    pass


class NegativeAreaError(GeometryError):
    pass


class AllFramesFailedError(GeometryError):
    pass


def with_frame(exc, frame):
    """Return a copy of ``exc`` tagged with ``frame``."""
    if exc.frame is not None:
        return exc
    msg = str(exc.args[0]) if exc.args else ""
    new = type(exc)(msg, frame=frame, slice_index=exc.slice_index)
    return new
