"""Per-instance 3D lifting of masked RGB-D pixels plus the
complementary background cloud.

For every instance, in manifest order: compute the depth band over the
masked pixels, keep the masked pixels whose depth falls inside it, and
back-project each kept pixel into a colored 3D point.  Pixels a mask
claims but the band rejects are environment, so they fall through to
the background cloud, which is the set of valid-depth pixels no
instance kept.  With the band disabled and first-wins overlap handling
this makes the clouds a partition of the valid-depth pixels: every
pixel lands in exactly one cloud.

An instance whose masked pixels carry no valid depth at all is recorded
as a failure and skipped; one bad detection must not destroy the scene.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .band import BandConfig, DepthBand, apply_band, compute_band
from .camera import CameraIntrinsics, DepthModel, back_project_pixels
from .cloud import PointCloud
from .errors import DimensionMismatchError, NoValidDepthError
from .frames import ColorImage, DepthImage, validate_alignment
from .masks import InstanceMask


class OverlapPolicy(enum.Enum):
    """What to do with a pixel claimed by more than one mask.

    FIRST_WINS keeps it in the earliest instance only (preserving the
    partition property); DUPLICATE emits it from every claiming
    instance.
    """

    FIRST_WINS = "first-wins"
    DUPLICATE = "duplicate"


@dataclass(frozen=True)
class LiftConfig:
    depth_model: DepthModel = DepthModel.PLANAR_Z
    band: BandConfig | None = field(default_factory=BandConfig)
    emit_background: bool = True
    overlap: OverlapPolicy = OverlapPolicy.FIRST_WINS


@dataclass(frozen=True)
class InstanceStats:
    """Where every masked pixel of one instance went."""

    id: int
    class_name: str
    masked: int
    invalid_depth: int
    band_rejected: int
    overlap_dropped: int
    kept: int
    band: DepthBand | None
    error: str | None = None


@dataclass(frozen=True)
class LiftedInstance:
    id: int
    class_name: str
    score: float
    cloud: PointCloud


@dataclass(frozen=True)
class SceneSegmentation:
    """Per-instance clouds, the leftover background, and accounting."""

    instances: tuple[LiftedInstance, ...]
    background: PointCloud | None
    stats: tuple[InstanceStats, ...]


def _check_frame_shapes(color: ColorImage, depth: DepthImage, intr: CameraIntrinsics) -> None:
    validate_alignment(color, depth)
    if depth.samples.shape != intr.shape:
        raise DimensionMismatchError(
            f"frames are {depth.width}x{depth.height}, intrinsics expect "
            f"{intr.width}x{intr.height}"
        )


def _check_mask_shape(mask: InstanceMask, depth: DepthImage) -> None:
    if mask.bitmap.shape != depth.samples.shape:
        raise DimensionMismatchError(
            f"instance {mask.id}: mask is {mask.bitmap.shape}, "
            f"frame is {depth.samples.shape}"
        )


def _cloud_from_grid(
    color: ColorImage,
    depth: DepthImage,
    kept: np.ndarray,
    intr: CameraIntrinsics,
    model: DepthModel,
) -> PointCloud:
    """Back-project every kept pixel, in row-major pixel order."""
    rows, cols = np.nonzero(kept)
    if rows.size == 0:
        return PointCloud.empty()
    depths = depth.millimeters()[rows, cols]
    points = back_project_pixels(cols, rows, depths, intr, model)
    colors = np.ascontiguousarray(color.pixels[rows, cols])
    return PointCloud(points=points, colors=colors)


def _kept_grid(
    depth: DepthImage, mask: InstanceMask, cfg: LiftConfig
) -> tuple[np.ndarray, DepthBand | None]:
    """Masked pixels surviving validity + band filtering."""
    if cfg.band is None:
        return mask.bitmap & depth.valid(), None
    band = compute_band(depth, mask, cfg.band)
    return apply_band(depth, mask, band), band


def lift_instance(
    color: ColorImage,
    depth: DepthImage,
    mask: InstanceMask,
    intr: CameraIntrinsics,
    cfg: LiftConfig,
) -> PointCloud:
    """Lift one instance in isolation (no overlap bookkeeping)."""
    _check_frame_shapes(color, depth, intr)
    _check_mask_shape(mask, depth)
    kept, _ = _kept_grid(depth, mask, cfg)
    return _cloud_from_grid(color, depth, kept, intr, cfg.depth_model)


def lift_background(
    color: ColorImage,
    depth: DepthImage,
    kept_union: np.ndarray,
    intr: CameraIntrinsics,
    cfg: LiftConfig,
) -> PointCloud:
    """Everything with a valid depth that no instance kept.

    No band filtering applies: the background is whatever remains.
    """
    _check_frame_shapes(color, depth, intr)
    if kept_union.shape != depth.samples.shape:
        raise DimensionMismatchError(
            f"kept union is {kept_union.shape}, frame is {depth.samples.shape}"
        )
    grid = depth.valid() & ~kept_union
    return _cloud_from_grid(color, depth, grid, intr, cfg.depth_model)


def lift_scene(
    color: ColorImage,
    depth: DepthImage,
    masks,
    intr: CameraIntrinsics,
    cfg: LiftConfig | None = None,
) -> SceneSegmentation:
    """Lift every instance (in manifest order) and the background.

    ``masks`` is the InstanceMask sequence from load_manifest.  A
    per-instance NoValidDepthError is recorded in stats and the scene
    continues; dimension mismatches are fatal.
    """
    cfg = cfg or LiftConfig()
    _check_frame_shapes(color, depth, intr)
    for mask in masks:
        _check_mask_shape(mask, depth)

    valid = depth.valid()
    kept_union = np.zeros(depth.samples.shape, dtype=bool)
    instances: list[LiftedInstance] = []
    stats: list[InstanceStats] = []

    for mask in masks:
        masked = int(mask.bitmap.sum())
        invalid = int((mask.bitmap & ~valid).sum())
        try:
            inband, used_band = _kept_grid(depth, mask, cfg)
        except NoValidDepthError as exc:
            stats.append(
                InstanceStats(
                    id=mask.id,
                    class_name=mask.class_name,
                    masked=masked,
                    invalid_depth=invalid,
                    band_rejected=0,
                    overlap_dropped=0,
                    kept=0,
                    band=None,
                    error=str(exc),
                )
            )
            continue
        band_rejected = int((mask.bitmap & valid & ~inband).sum())
        if cfg.overlap is OverlapPolicy.FIRST_WINS:
            kept = inband & ~kept_union
            overlap_dropped = int((inband & kept_union).sum())
        else:
            kept = inband
            overlap_dropped = 0
        kept_union |= inband
        cloud = _cloud_from_grid(color, depth, kept, intr, cfg.depth_model)
        instances.append(
            LiftedInstance(id=mask.id, class_name=mask.class_name, score=mask.score, cloud=cloud)
        )
        stats.append(
            InstanceStats(
                id=mask.id,
                class_name=mask.class_name,
                masked=masked,
                invalid_depth=invalid,
                band_rejected=band_rejected,
                overlap_dropped=overlap_dropped,
                kept=int(kept.sum()),
                band=used_band,
            )
        )

    background = None
    if cfg.emit_background:
        background = _cloud_from_grid(
            color, depth, valid & ~kept_union, intr, cfg.depth_model
        )
    return SceneSegmentation(
        instances=tuple(instances), background=background, stats=tuple(stats)
    )
