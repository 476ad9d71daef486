"""Exception types raised across the pipeline.

Everything derives from :class:`RgbdLiftError` so callers (notably the
CLI) can map the whole family onto one exit code.
"""


class RgbdLiftError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(RgbdLiftError):
    """A file exists but is not in the accepted format (bit depth,
    channel count, encoding, header...)."""


class SchemaError(RgbdLiftError):
    """A JSON document does not match its declared schema."""


class DimensionMismatchError(RgbdLiftError):
    """Two buffers that must share dimensions do not."""


class NonBinaryMaskError(FormatError):
    """A mask PNG contains a value other than 0 or 255."""


class DuplicateIdError(SchemaError):
    """Two instances in one manifest share an id."""


class InvalidDepthError(RgbdLiftError):
    """A depth sample of 0 (no reading) was used where a valid depth is
    required."""


class OutOfBoundsError(RgbdLiftError):
    """A pixel coordinate lies outside the image."""


class NonPositiveZError(RgbdLiftError):
    """A 3D point with z <= 0 cannot be projected."""


class NoValidDepthError(RgbdLiftError):
    """Every masked pixel has depth 0, so no depth band can be computed."""


class TooFewPointsError(RgbdLiftError):
    """Not enough points remain to measure an extent."""


class OutOfFrustumError(RgbdLiftError):
    """A synthetic object does not fit inside the camera frustum."""
