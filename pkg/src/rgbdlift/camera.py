"""Pinhole-camera math: back-projection of pixels with depth into 3D,
and the forward projection used for round-trip testing and synthesis.

Coordinate conventions
----------------------

Camera frame: right-handed, ``+x`` right, ``+y`` down, ``+z`` forward.
All 3D coordinates are millimeters, double precision; conversion to
meters happens only at export time.

Pixel ``(col, row)`` back-projects from its integer coordinate (not the
half-pixel center): the centered offsets are ``u = col - cx`` and
``v = row - cy``.  Measurement tolerances downstream must therefore
account for up to one pixel of quantization.

Depth conventions
-----------------

Two interpretations of a stored depth value ``d`` are supported:

``PLANAR_Z``
    ``d`` is the distance along the optical axis (the sensor-native
    convention of RealSense-style stereo cameras)::

        z = d,    x = u * z / fx,    y = v * z / fy

``RAY_DISTANCE``
    ``d`` is the Euclidean distance along the viewing ray, so it must
    be foreshortened before use::

        z = d / sqrt(1 + (u/fx)^2 + (v/fy)^2)

    and then x, y as above.  On the optical axis the two conventions
    coincide; off axis the ray model always yields a strictly smaller z.

Everything here is a pure function over immutable inputs and safe to
call from multiple threads.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDepthError, NonPositiveZError, OutOfBoundsError, SchemaError


class DepthModel(enum.Enum):
    """How a stored depth value maps to camera-frame z."""

    PLANAR_Z = "planar"
    RAY_DISTANCE = "ray"


# JSON keys accepted in an intrinsics file; anything else is rejected.
_INTRINSICS_KEYS = {"fx", "fy", "cx", "cy", "width", "height", "depth_scale"}


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole intrinsics plus the depth-unit scale of the sensor.

    fx, fy are focal lengths in pixels; cx, cy the principal point.
    ``depth_scale`` converts a stored depth sample to millimeters.
    """

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int
    depth_scale: float = 1.0

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise ValueError(f"focal lengths must be positive, got fx={self.fx}, fy={self.fy}")
        if not (self.width > 0 and self.height > 0):
            raise ValueError(f"image size must be positive, got {self.width}x{self.height}")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError(
                f"principal point ({self.cx}, {self.cy}) outside {self.width}x{self.height} image"
            )
        if not self.depth_scale > 0:
            raise ValueError(f"depth_scale must be positive, got {self.depth_scale}")

    @property
    def shape(self) -> tuple[int, int]:
        """(height, width), the numpy array shape of a frame."""
        return (self.height, self.width)

    def contains(self, col: int, row: int) -> bool:
        return 0 <= col < self.width and 0 <= row < self.height

    @classmethod
    def from_dict(cls, data: dict) -> "CameraIntrinsics":
        if not isinstance(data, dict):
            raise SchemaError(f"intrinsics must be a JSON object, got {type(data).__name__}")
        unknown = set(data) - _INTRINSICS_KEYS
        if unknown:
            raise SchemaError(f"unknown intrinsics keys: {sorted(unknown)}")
        missing = (_INTRINSICS_KEYS - {"depth_scale"}) - set(data)
        if missing:
            raise SchemaError(f"missing intrinsics keys: {sorted(missing)}")
        for key, value in data.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise SchemaError(f"intrinsics key {key!r} must be numeric, got {value!r}")
        for key in ("width", "height"):
            if data[key] != int(data[key]):
                raise SchemaError(f"intrinsics key {key!r} must be an integer, got {data[key]!r}")
        try:
            return cls(
                fx=float(data["fx"]),
                fy=float(data["fy"]),
                cx=float(data["cx"]),
                cy=float(data["cy"]),
                width=int(data["width"]),
                height=int(data["height"]),
                depth_scale=float(data.get("depth_scale", 1.0)),
            )
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "CameraIntrinsics":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {
            "fx": self.fx,
            "fy": self.fy,
            "cx": self.cx,
            "cy": self.cy,
            "width": self.width,
            "height": self.height,
            "depth_scale": self.depth_scale,
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def back_project(
    col: int,
    row: int,
    depth_mm: float,
    intr: CameraIntrinsics,
    model: DepthModel = DepthModel.PLANAR_Z,
) -> np.ndarray:
    """Map one pixel plus its depth to a camera-frame point (x, y, z) in mm.

    Raises InvalidDepthError for depth_mm <= 0 (0 encodes "no reading")
    and OutOfBoundsError for a pixel outside the image.
    """
    if depth_mm <= 0:
        raise InvalidDepthError(f"depth {depth_mm} is not a valid sample")
    if not intr.contains(col, row):
        raise OutOfBoundsError(
            f"pixel ({col}, {row}) outside {intr.width}x{intr.height} image"
        )
    u = col - intr.cx
    v = row - intr.cy
    if model is DepthModel.PLANAR_Z:
        z = float(depth_mm)
    else:
        z = depth_mm / math.sqrt(1.0 + (u / intr.fx) ** 2 + (v / intr.fy) ** 2)
    return np.array([u * z / intr.fx, v * z / intr.fy, z], dtype=np.float64)


def back_project_pixels(
    cols: np.ndarray,
    rows: np.ndarray,
    depths_mm: np.ndarray,
    intr: CameraIntrinsics,
    model: DepthModel = DepthModel.PLANAR_Z,
) -> np.ndarray:
    """Vectorized back_project over parallel arrays; returns (N, 3) float64.

    The per-pixel kernel of the whole pipeline.  Inputs are assumed
    pre-validated (in-bounds pixels, positive depths); callers filter
    invalid samples before reaching here.
    """
    u = np.asarray(cols, dtype=np.float64) - intr.cx
    v = np.asarray(rows, dtype=np.float64) - intr.cy
    d = np.asarray(depths_mm, dtype=np.float64)
    if model is DepthModel.PLANAR_Z:
        z = d
    else:
        z = d / np.sqrt(1.0 + (u / intr.fx) ** 2 + (v / intr.fy) ** 2)
    out = np.empty((d.shape[0], 3), dtype=np.float64)
    out[:, 0] = u * z / intr.fx
    out[:, 1] = v * z / intr.fy
    out[:, 2] = z
    return out


def project(
    point,
    intr: CameraIntrinsics,
    model: DepthModel = DepthModel.PLANAR_Z,
) -> tuple[tuple[float, float], float]:
    """Exact inverse of back_project, for round-trip tests and synthesis.

    Returns ((col, row), depth_mm) with real-valued pixel coordinates,
    i.e. before any rasterization.  Under RAY_DISTANCE the returned
    depth is the Euclidean ray length, so back_project inverts exactly.
    """
    x, y, z = (float(point[0]), float(point[1]), float(point[2]))
    if z <= 0:
        raise NonPositiveZError(f"cannot project point with z={z}")
    col = x * intr.fx / z + intr.cx
    row = y * intr.fy / z + intr.cy
    if model is DepthModel.PLANAR_Z:
        d = z
    else:
        d = math.sqrt(x * x + y * y + z * z)
    return (col, row), d


def project_points(
    points: np.ndarray,
    intr: CameraIntrinsics,
    model: DepthModel = DepthModel.PLANAR_Z,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized project over an (N, 3) array.

    Returns (cols, rows, depths_mm) as float64 arrays.  All z must be
    positive.
    """
    pts = np.asarray(points, dtype=np.float64)
    z = pts[:, 2]
    if np.any(z <= 0):
        raise NonPositiveZError("cannot project points with z <= 0")
    cols = pts[:, 0] * intr.fx / z + intr.cx
    rows = pts[:, 1] * intr.fy / z + intr.cy
    if model is DepthModel.PLANAR_Z:
        d = z.copy()
    else:
        d = np.sqrt(np.sum(pts * pts, axis=1))
    return cols, rows, d
