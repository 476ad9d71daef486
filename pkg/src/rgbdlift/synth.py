"""Analytic RGB-D scene generator: color, depth, masks and exact ground
truth, so the full pipeline is verifiable without a sensor.

Scenes are a single object in front of a fronto-parallel background
plane.  Object membership per pixel is closed form (rectangle test or
ray-sphere intersection), so the only departures from ground truth are
rasterization (pixel centers on an integer grid) and 16-bit depth
quantization (half a stored unit), both bounded.

Depth values are encoded under either depth convention: a planar-z
scene stores z directly, a ray-distance scene stores the Euclidean ray
length.  Rendering the same sphere under both conventions is what lets
tests tell the two reconstruction models apart.

An optional uniform depth jitter (+/- jitter_mm, seeded, deterministic)
exists for band-filter stress tests; it is off by default so masks and
depths stay exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .camera import CameraIntrinsics, DepthModel
from .errors import OutOfFrustumError
from .frames import ColorImage, DepthImage, write_color_png, write_depth_png
from .masks import InstanceMask, ManifestEntry, MaskManifest, write_mask_png

BACKGROUND_COLOR = (96, 96, 96)


@dataclass(frozen=True)
class BoxFaceSpec:
    """Fronto-parallel rectangular face at a fixed depth plane."""

    width_mm: float
    height_mm: float
    center_depth_mm: float
    offset_x_mm: float = 0.0
    offset_y_mm: float = 0.0
    color: tuple[int, int, int] = (200, 60, 60)

    def __post_init__(self):
        if not (self.width_mm > 0 and self.height_mm > 0):
            raise ValueError(f"face must have positive size, got {self.width_mm}x{self.height_mm}")
        if not self.center_depth_mm > 0:
            raise ValueError(f"center depth must be positive, got {self.center_depth_mm}")


@dataclass(frozen=True)
class SphereSpec:
    """Sphere in camera frame; discriminates the two depth conventions."""

    center_mm: tuple[float, float, float]
    radius_mm: float
    color: tuple[int, int, int] = (60, 120, 200)

    def __post_init__(self):
        if not self.radius_mm > 0:
            raise ValueError(f"radius must be positive, got {self.radius_mm}")
        if not self.center_mm[2] > self.radius_mm:
            raise ValueError(
                f"sphere center z {self.center_mm[2]} must exceed radius {self.radius_mm}"
            )


@dataclass(frozen=True)
class GroundTruthObject:
    id: int
    class_name: str
    width_mm: float
    height_mm: float
    center_depth_mm: float


@dataclass(frozen=True)
class SynthScene:
    """A complete, internally aligned synthetic capture."""

    color: ColorImage
    depth: DepthImage
    intrinsics: CameraIntrinsics
    manifest: MaskManifest
    masks: tuple[InstanceMask, ...]
    ground_truth: tuple[GroundTruthObject, ...]


def _pixel_grids(intr: CameraIntrinsics) -> tuple[np.ndarray, np.ndarray]:
    """Centered pixel offsets (u, v) as full (H, W) grids."""
    cols = np.arange(intr.width, dtype=np.float64) - intr.cx
    rows = np.arange(intr.height, dtype=np.float64) - intr.cy
    u, v = np.meshgrid(cols, rows)
    return u, v


def _ray_factor(u: np.ndarray, v: np.ndarray, intr: CameraIntrinsics) -> np.ndarray:
    return np.sqrt(1.0 + (u / intr.fx) ** 2 + (v / intr.fy) ** 2)


def _encode_depth(
    z_mm: np.ndarray,
    u: np.ndarray,
    v: np.ndarray,
    intr: CameraIntrinsics,
    model: DepthModel,
) -> np.ndarray:
    """Continuous depth values as the sensor would report them."""
    if model is DepthModel.PLANAR_Z:
        return np.asarray(z_mm, dtype=np.float64)
    return z_mm * _ray_factor(u, v, intr)


def _quantize(d_mm: np.ndarray, intr: CameraIntrinsics) -> np.ndarray:
    stored = np.round(d_mm / intr.depth_scale)
    if stored.max() > 65535:
        raise ValueError(
            f"depth {d_mm.max():.1f} mm does not fit 16 bits at scale {intr.depth_scale}"
        )
    if stored.min() < 1:
        raise ValueError("depth quantized to 0 (the invalid sentinel); scene too close")
    return stored.astype(np.uint16)


def _apply_jitter(d_mm: np.ndarray, jitter_mm: float, seed: int) -> np.ndarray:
    if jitter_mm == 0.0:
        return d_mm
    if jitter_mm < 0:
        raise ValueError(f"jitter must be non-negative, got {jitter_mm}")
    rng = np.random.default_rng(seed)
    return d_mm + rng.uniform(-jitter_mm, jitter_mm, size=d_mm.shape)


def _assemble_scene(
    face: np.ndarray,
    depth_mm: np.ndarray,
    color_rgb: tuple[int, int, int],
    class_name: str,
    truth: GroundTruthObject,
    intr: CameraIntrinsics,
    jitter_mm: float,
    seed: int,
) -> SynthScene:
    depth_mm = _apply_jitter(depth_mm, jitter_mm, seed)
    depth = DepthImage(samples=_quantize(depth_mm, intr), depth_scale=intr.depth_scale)
    pixels = np.empty((intr.height, intr.width, 3), dtype=np.uint8)
    pixels[:] = BACKGROUND_COLOR
    pixels[face] = color_rgb
    color = ColorImage(pixels=pixels)
    mask = InstanceMask(id=1, class_name=class_name, score=1.0, bitmap=face)
    manifest = MaskManifest(
        color_image="color.png",
        instances=(
            ManifestEntry(id=1, class_name=class_name, score=1.0, mask_file="mask_1.png"),
        ),
    )
    return SynthScene(
        color=color,
        depth=depth,
        intrinsics=intr,
        manifest=manifest,
        masks=(mask,),
        ground_truth=(truth,),
    )


def render_box(
    spec: BoxFaceSpec,
    intr: CameraIntrinsics,
    background_depth_mm: float,
    model: DepthModel = DepthModel.PLANAR_Z,
    jitter_mm: float = 0.0,
    seed: int = 0,
) -> SynthScene:
    """Render a rectangular face over a background plane.

    A pixel belongs to the face iff its ray at z = center_depth lands
    inside the rectangle (inclusive edges), so the rasterized span is
    the pixel-coverage rounding of width * fx / center_depth.
    """
    if not background_depth_mm > spec.center_depth_mm:
        raise OutOfFrustumError(
            f"background at {background_depth_mm} mm must lie behind the "
            f"face at {spec.center_depth_mm} mm"
        )
    z = spec.center_depth_mm
    half_w, half_h = spec.width_mm / 2.0, spec.height_mm / 2.0
    for corner_x in (spec.offset_x_mm - half_w, spec.offset_x_mm + half_w):
        col = corner_x * intr.fx / z + intr.cx
        if not 0 <= col <= intr.width - 1:
            raise OutOfFrustumError(f"face edge projects to column {col:.1f}")
    for corner_y in (spec.offset_y_mm - half_h, spec.offset_y_mm + half_h):
        row = corner_y * intr.fy / z + intr.cy
        if not 0 <= row <= intr.height - 1:
            raise OutOfFrustumError(f"face edge projects to row {row:.1f}")

    u, v = _pixel_grids(intr)
    plane_x = u * z / intr.fx
    plane_y = v * z / intr.fy
    face = (np.abs(plane_x - spec.offset_x_mm) <= half_w) & (
        np.abs(plane_y - spec.offset_y_mm) <= half_h
    )
    depth_mm = np.where(
        face,
        _encode_depth(np.full(face.shape, z), u, v, intr, model),
        _encode_depth(np.full(face.shape, float(background_depth_mm)), u, v, intr, model),
    )
    truth = GroundTruthObject(
        id=1,
        class_name="box",
        width_mm=spec.width_mm,
        height_mm=spec.height_mm,
        center_depth_mm=spec.center_depth_mm,
    )
    return _assemble_scene(face, depth_mm, spec.color, "box", truth, intr, jitter_mm, seed)


def render_sphere(
    spec: SphereSpec,
    intr: CameraIntrinsics,
    background_depth_mm: float,
    model: DepthModel = DepthModel.PLANAR_Z,
    jitter_mm: float = 0.0,
    seed: int = 0,
) -> SynthScene:
    """Render a sphere by analytic ray-sphere intersection.

    The frustum check is conservative: the silhouette may not touch the
    outermost pixel ring and must hit at least one pixel.
    """
    cx_mm, cy_mm, cz_mm = (float(c) for c in spec.center_mm)
    if not cz_mm + spec.radius_mm < background_depth_mm:
        raise OutOfFrustumError(
            f"sphere back at {cz_mm + spec.radius_mm} mm is not in front of "
            f"background at {background_depth_mm} mm"
        )

    u, v = _pixel_grids(intr)
    # Ray through each pixel: t * (u/fx, v/fy, 1).
    dx, dy = u / intr.fx, v / intr.fy
    a = dx * dx + dy * dy + 1.0
    dot = dx * cx_mm + dy * cy_mm + cz_mm
    disc = dot * dot - a * (cx_mm**2 + cy_mm**2 + cz_mm**2 - spec.radius_mm**2)
    hit = disc >= 0
    t = np.full(hit.shape, background_depth_mm, dtype=np.float64)
    t_hit = (dot[hit] - np.sqrt(disc[hit])) / a[hit]
    hit[hit] = t_hit > 0
    t[hit] = t_hit[t_hit > 0]

    if not hit.any():
        raise OutOfFrustumError("sphere does not project onto any pixel")
    border = np.zeros(hit.shape, dtype=bool)
    border[0, :] = border[-1, :] = True
    border[:, 0] = border[:, -1] = True
    if (hit & border).any():
        raise OutOfFrustumError("sphere silhouette reaches the image border")

    # t is the surface z (ray z component is 1); background keeps its plane z.
    depth_mm = _encode_depth(t, u, v, intr, model)
    truth = GroundTruthObject(
        id=1,
        class_name="sphere",
        width_mm=2 * spec.radius_mm,
        height_mm=2 * spec.radius_mm,
        center_depth_mm=cz_mm,
    )
    return _assemble_scene(hit, depth_mm, spec.color, "sphere", truth, intr, jitter_mm, seed)


def write_scene(scene: SynthScene, out_dir) -> None:
    """Write the scene in the interchange formats the pipeline ingests:
    color.png, depth.png, intrinsics.json, manifest.json, one mask PNG
    per instance, and ground_truth.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_color_png(scene.color, out / "color.png")
    write_depth_png(scene.depth, out / "depth.png")
    scene.intrinsics.save(out / "intrinsics.json")
    for entry, mask in zip(scene.manifest.instances, scene.masks):
        write_mask_png(mask.bitmap, out / entry.mask_file)
    manifest_doc = {
        "color_image": scene.manifest.color_image,
        "instances": [
            {
                "id": e.id,
                "class_name": e.class_name,
                "score": e.score,
                "mask_file": e.mask_file,
            }
            for e in scene.manifest.instances
        ],
    }
    truth_doc = {
        "objects": [
            {
                "id": t.id,
                "class_name": t.class_name,
                "width_mm": t.width_mm,
                "height_mm": t.height_mm,
                "center_depth_mm": t.center_depth_mm,
            }
            for t in scene.ground_truth
        ]
    }
    for name, doc in (("manifest.json", manifest_doc), ("ground_truth.json", truth_doc)):
        with open(out / name, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
