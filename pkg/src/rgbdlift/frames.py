"""Loading and writing the aligned RGB-D frame pair.

Interchange contract: color is an 8-bit RGB (or RGBA, alpha dropped)
PNG; depth is a 16-bit single-channel grayscale PNG whose sample value
times ``depth_scale`` is millimeters, with 0 reserved as the invalid
"no reading" sentinel.  Frames must arrive pre-aligned: same resolution,
pixel (col, row) corresponding in both.

Format checks read the PNG IHDR chunk directly so the declared bit
depth is checked exactly, not whatever a decoder happens to upconvert
or truncate to.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .errors import DimensionMismatchError, FormatError

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"

# PNG color types (IHDR byte 25)
_GRAY = 0
_RGB = 2
_PALETTE = 3
_GRAY_ALPHA = 4
_RGBA = 6


@dataclass(frozen=True)
class ColorImage:
    """Row-major 8-bit RGB pixels, shape (height, width, 3)."""

    pixels: np.ndarray

    def __post_init__(self):
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise ValueError(f"color pixels must be (H, W, 3), got {self.pixels.shape}")
        if self.pixels.dtype != np.uint8:
            raise ValueError(f"color pixels must be uint8, got {self.pixels.dtype}")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class DepthImage:
    """Row-major 16-bit depth samples, shape (height, width).

    A sample v encodes v * depth_scale millimeters; 0 means invalid.
    """

    samples: np.ndarray
    depth_scale: float = 1.0

    def __post_init__(self):
        if self.samples.ndim != 2:
            raise ValueError(f"depth samples must be (H, W), got {self.samples.shape}")
        if self.samples.dtype != np.uint16:
            raise ValueError(f"depth samples must be uint16, got {self.samples.dtype}")
        if not self.depth_scale > 0:
            raise ValueError(f"depth_scale must be positive, got {self.depth_scale}")

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    def millimeters(self) -> np.ndarray:
        """Depth in mm as float64; exact for binary-fraction scales."""
        return self.samples.astype(np.float64) * self.depth_scale

    def valid(self) -> np.ndarray:
        """Boolean grid of pixels that carry a real reading."""
        return self.samples != 0


def _read_ihdr(path) -> tuple[int, int, int, int]:
    """Return (width, height, bit_depth, color_type) from the PNG header."""
    with open(path, "rb") as fh:
        head = fh.read(33)
    if len(head) < 33 or head[:8] != _PNG_SIGNATURE:
        raise FormatError(f"{path}: not a PNG file")
    if head[12:16] != b"IHDR":
        raise FormatError(f"{path}: malformed PNG (IHDR not first chunk)")
    width, height = struct.unpack(">II", head[16:24])
    bit_depth, color_type = head[24], head[25]
    return width, height, bit_depth, color_type


def load_color(path) -> ColorImage:
    """Load an 8-bit RGB or RGBA PNG; alpha, if present, is dropped."""
    _, _, bit_depth, color_type = _read_ihdr(path)
    if bit_depth != 8:
        raise FormatError(f"{path}: color PNG must be 8-bit, got {bit_depth}-bit")
    if color_type not in (_RGB, _RGBA):
        raise FormatError(
            f"{path}: color PNG must be RGB or RGBA, got PNG color type {color_type}"
        )
    with Image.open(path) as img:
        arr = np.asarray(img)
    pixels = np.ascontiguousarray(arr[:, :, :3])
    return ColorImage(pixels=pixels)


def load_depth(path, intr) -> DepthImage:
    """Load a 16-bit grayscale PNG as depth in units of intr.depth_scale mm.

    Dimensions are validated against the intrinsics.
    """
    width, height, bit_depth, color_type = _read_ihdr(path)
    if bit_depth != 16 or color_type != _GRAY:
        raise FormatError(
            f"{path}: depth PNG must be 16-bit grayscale, got "
            f"{bit_depth}-bit PNG color type {color_type}"
        )
    if (width, height) != (intr.width, intr.height):
        raise DimensionMismatchError(
            f"{path}: depth is {width}x{height}, intrinsics expect "
            f"{intr.width}x{intr.height}"
        )
    with Image.open(path) as img:
        arr = np.asarray(img)
    samples = arr.astype(np.uint16) if arr.dtype != np.uint16 else arr.copy()
    return DepthImage(samples=samples, depth_scale=intr.depth_scale)


def validate_alignment(color: ColorImage, depth: DepthImage) -> None:
    """Raise DimensionMismatchError unless the frames share a resolution."""
    if (color.width, color.height) != (depth.width, depth.height):
        raise DimensionMismatchError(
            f"color is {color.width}x{color.height}, "
            f"depth is {depth.width}x{depth.height}"
        )


def write_color_png(color: ColorImage, path) -> None:
    Image.fromarray(color.pixels, mode="RGB").save(path, format="PNG")


def write_depth_png(depth: DepthImage, path) -> None:
    # A uint16 array maps to Pillow's I;16 mode: a 16-bit grayscale PNG.
    img = Image.fromarray(depth.samples.astype("<u2"))
    img.save(path, format="PNG")
