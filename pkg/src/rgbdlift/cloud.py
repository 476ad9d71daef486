"""Point-cloud container, ASCII PLY import/export, and axis-aligned
extent measurement.

Coordinates are kept in double precision millimeters internally and
written to PLY as float32 (the format's conventional precision), using
the shortest decimal string that uniquely round-trips each float32.
Export is deterministic: identical clouds produce identical bytes.

The extent measurement sorts one coordinate axis and drops an equal
fraction from each tail before taking max - min, which suppresses
depth-speckle outliers; a trim fraction of 0 reproduces the raw span.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, TooFewPointsError

PLY_PROPERTIES = (
    "property float x",
    "property float y",
    "property float z",
    "property uchar red",
    "property uchar green",
    "property uchar blue",
)


class Units(enum.Enum):
    MILLIMETERS = "mm"
    METERS = "m"


class Axis(enum.Enum):
    X = "x"
    Y = "y"
    Z = "z"

    @property
    def index(self) -> int:
        return {"x": 0, "y": 1, "z": 2}[self.value]


@dataclass(frozen=True)
class PointCloud:
    """Ordered points (N, 3) float64 mm with parallel (N, 3) uint8 colors."""

    points: np.ndarray
    colors: np.ndarray

    def __post_init__(self):
        pts = self.points
        cols = self.colors
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"points must be (N, 3), got {pts.shape}")
        if cols.shape != pts.shape:
            raise ValueError(f"colors {cols.shape} must parallel points {pts.shape}")
        if pts.dtype != np.float64:
            raise ValueError(f"points must be float64, got {pts.dtype}")
        if cols.dtype != np.uint8:
            raise ValueError(f"colors must be uint8, got {cols.dtype}")
        if pts.size and not np.all(np.isfinite(pts)):
            raise ValueError("points contain non-finite coordinates")

    def __len__(self) -> int:
        return self.points.shape[0]

    @classmethod
    def empty(cls) -> "PointCloud":
        return cls(
            points=np.empty((0, 3), dtype=np.float64),
            colors=np.empty((0, 3), dtype=np.uint8),
        )


@dataclass(frozen=True)
class ExtentReport:
    """Span along one axis after symmetric tail trimming.

    ``point_count`` is the number of points the span was measured over,
    i.e. after trimming.
    """

    axis: Axis
    extent_mm: float
    trim_fraction: float
    point_count: int


def _vertex_lines(coords32: np.ndarray, colors: np.ndarray) -> list[str]:
    """Format vertices as "x y z r g b" rows.

    Nine significant digits round-trip any float32 exactly, so the
    written file reloads to the same single-precision coordinates.
    Color triples repeat heavily in real frames (and massively in
    synthetic ones), so their strings are built once per distinct color;
    a full-VGA cloud formats in well under a second.
    """
    packed = (
        (colors[:, 0].astype(np.uint32) << 16)
        | (colors[:, 1].astype(np.uint32) << 8)
        | colors[:, 2].astype(np.uint32)
    )
    unique, inverse = np.unique(packed, return_inverse=True)
    suffixes = np.array(
        [f"{k >> 16} {(k >> 8) & 255} {k & 255}" for k in unique.tolist()], dtype=object
    )
    per_point = suffixes[inverse]
    return [
        "%.9g %.9g %.9g " % tuple(xyz) + rgb
        for xyz, rgb in zip(coords32.astype(np.float64).tolist(), per_point.tolist())
    ]


def export_ply(pc: PointCloud, path, units: Units = Units.MILLIMETERS) -> None:
    """Write an ASCII PLY with xyz + uchar RGB vertices.

    Written atomically (temp file + rename) so readers never observe a
    partial cloud.
    """
    coords = pc.points if units is Units.MILLIMETERS else pc.points / 1000.0
    coords32 = coords.astype(np.float32)
    lines = [
        "ply",
        "format ascii 1.0",
        f"element vertex {len(pc)}",
        *PLY_PROPERTIES,
        "end_header",
    ]
    if len(pc):
        lines.extend(_vertex_lines(coords32, pc.colors))
    payload = "\n".join(lines) + "\n"
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write(payload)
    os.replace(tmp, path)


def _parse_vertex(line: str, lineno: int):
    parts = line.split()
    if len(parts) != 6:
        raise FormatError(f"line {lineno}: expected 6 vertex fields, got {len(parts)}")
    try:
        xyz = [float(p) for p in parts[:3]]
        rgb = [int(p) for p in parts[3:]]
    except ValueError as exc:
        raise FormatError(f"line {lineno}: {exc}") from exc
    if not all(math.isfinite(c) for c in xyz):
        raise FormatError(f"line {lineno}: non-finite coordinate")
    if not all(0 <= c <= 255 for c in rgb):
        raise FormatError(f"line {lineno}: color component outside 0..255")
    return xyz, rgb


def import_ply(path) -> PointCloud:
    """Read a cloud written by export_ply (ASCII, xyz + uchar RGB only).

    Units are whatever the writer used; the caller tracks them.
    """
    try:
        with open(path, "r", encoding="ascii") as fh:
            text = fh.read()
    except (UnicodeDecodeError, ValueError) as exc:
        raise FormatError(f"{path}: not an ASCII PLY file ({exc})") from exc
    lines = text.splitlines()
    if lines[:1] != ["ply"]:
        raise FormatError(f"{path}: missing 'ply' magic line")
    if len(lines) < 2 or lines[1] != "format ascii 1.0":
        got = lines[1] if len(lines) > 1 else "<eof>"
        raise FormatError(f"{path}: unsupported format line {got!r} (ASCII 1.0 only)")
    if len(lines) < 3 or not lines[2].startswith("element vertex "):
        raise FormatError(f"{path}: missing 'element vertex' declaration")
    try:
        count = int(lines[2][len("element vertex "):])
    except ValueError as exc:
        raise FormatError(f"{path}: bad vertex count: {exc}") from exc
    if count < 0:
        raise FormatError(f"{path}: negative vertex count")
    props = lines[3:9]
    if tuple(props) != PLY_PROPERTIES:
        raise FormatError(f"{path}: vertex properties must be exactly {PLY_PROPERTIES}")
    if len(lines) < 10 or lines[9] != "end_header":
        raise FormatError(f"{path}: missing end_header")
    body = lines[10:]
    # Tolerate a single trailing blank line from the final newline, nothing more.
    while body and body[-1] == "":
        body.pop()
    if len(body) != count:
        raise FormatError(
            f"{path}: header declares {count} vertices but {len(body)} data lines present"
        )
    points = np.empty((count, 3), dtype=np.float64)
    colors = np.empty((count, 3), dtype=np.uint8)
    for i, line in enumerate(body):
        xyz, rgb = _parse_vertex(line, i + 11)
        points[i] = xyz
        colors[i] = rgb
    return PointCloud(points=points, colors=colors)


def measure_extent(pc: PointCloud, axis: Axis, trim_fraction: float = 0.0) -> ExtentReport:
    """Trimmed span of the cloud along one axis.

    Sorts the axis coordinates, drops floor(trim_fraction * N) points
    from each tail, and reports max - min of the remainder.  Raises
    TooFewPointsError when fewer than 2 points survive.
    """
    if not 0.0 <= trim_fraction < 0.5:
        raise ValueError(f"trim_fraction must be in [0, 0.5), got {trim_fraction}")
    n = len(pc)
    drop = math.floor(trim_fraction * n)
    remaining = n - 2 * drop
    if remaining < 2:
        raise TooFewPointsError(
            f"{n} points with trim {trim_fraction} leaves {max(remaining, 0)}, need >= 2"
        )
    coords = np.sort(pc.points[:, axis.index])
    extent = float(coords[n - 1 - drop] - coords[drop])
    return ExtentReport(
        axis=axis, extent_mm=extent, trim_fraction=trim_fraction, point_count=remaining
    )
