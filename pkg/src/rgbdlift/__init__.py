"""rgbdlift: lift 2D instance masks on aligned RGB-D frames into
per-object 3D point clouds plus a separated background cloud."""

from .band import BandCenter, BandConfig, DepthBand, apply_band, compute_band
from .camera import (
    CameraIntrinsics,
    DepthModel,
    back_project,
    back_project_pixels,
    project,
    project_points,
)
from .cloud import (
    Axis,
    ExtentReport,
    PointCloud,
    Units,
    export_ply,
    import_ply,
    measure_extent,
)
from .frames import (
    ColorImage,
    DepthImage,
    load_color,
    load_depth,
    validate_alignment,
    write_color_png,
    write_depth_png,
)
from .lift import (
    InstanceStats,
    LiftConfig,
    LiftedInstance,
    OverlapPolicy,
    SceneSegmentation,
    lift_background,
    lift_instance,
    lift_scene,
)
from .masks import (
    Contour,
    InstanceMask,
    ManifestEntry,
    MaskManifest,
    find_contours,
    load_manifest,
    mask_union,
    region_pixels,
)
from .synth import (
    BoxFaceSpec,
    GroundTruthObject,
    SphereSpec,
    SynthScene,
    render_box,
    render_sphere,
    write_scene,
)

__version__ = "0.1.0"
