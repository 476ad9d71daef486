"""Command-line front end: lift a frame, measure a cloud, generate
synthetic scenes.

Exit codes: 0 success, 2 validation/usage error (nothing written),
3 per-instance failures only (the rest of the scene is written).
All diagnostics go to stderr; results and reports go to stdout or
files.  Outputs carry no timestamps, so identical inputs and flags
give byte-identical output trees.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from pathlib import Path

from .band import BandCenter, BandConfig
from .camera import CameraIntrinsics, DepthModel
from .cloud import Axis, Units, export_ply, import_ply, measure_extent
from .errors import RgbdLiftError
from .frames import load_color, load_depth, validate_alignment
from .lift import LiftConfig, OverlapPolicy, lift_scene
from .masks import load_manifest
from .synth import BoxFaceSpec, SphereSpec, render_box, render_sphere, write_scene

DEFAULT_TRIM = 0.01


def _fmt(value: float) -> str:
    """Plain decimal without trailing zeros (203.333333, 200, 0.01)."""
    return f"{value:.6f}".rstrip("0").rstrip(".")


def _safe_name(class_name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_-]+", "_", class_name) or "object"


def _write_json_atomic(doc: dict, path: Path) -> None:
    tmp = Path(f"{path}.tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


def _add_intrinsics_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fx", type=float, default=600.0, help="focal length x, pixels")
    p.add_argument("--fy", type=float, default=600.0, help="focal length y, pixels")
    p.add_argument("--cx", type=float, default=None, help="principal point column (default: center)")
    p.add_argument("--cy", type=float, default=None, help="principal point row (default: center)")
    p.add_argument("--image-width", type=int, default=640)
    p.add_argument("--image-height", type=int, default=480)
    p.add_argument("--depth-scale", type=float, default=1.0, help="mm per stored depth unit")


def _add_synth_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", required=True, help="scene directory to write")
    p.add_argument("--background-depth-mm", type=float, default=2500.0)
    p.add_argument("--depth-model", choices=[m.value for m in DepthModel], default="planar")
    p.add_argument("--jitter-mm", type=float, default=0.0, help="uniform depth jitter half-range")
    p.add_argument("--seed", type=int, default=0, help="jitter RNG seed")
    _add_intrinsics_flags(p)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rgbdlift",
        description="Lift 2D instance masks on aligned RGB-D frames into 3D point clouds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    lift_p = sub.add_parser("lift", help="lift one RGB-D frame into per-instance clouds")
    lift_p.add_argument("--scene", help="directory with color.png, depth.png, intrinsics.json, manifest.json")
    lift_p.add_argument("--color", help="8-bit RGB(A) PNG")
    lift_p.add_argument("--depth", help="16-bit grayscale PNG")
    lift_p.add_argument("--intrinsics", help="intrinsics JSON")
    lift_p.add_argument("--masks", help="mask manifest JSON")
    lift_p.add_argument("--out", required=True, help="output directory")
    lift_p.add_argument("--depth-model", choices=[m.value for m in DepthModel], default="planar")
    lift_p.add_argument("--band-center", choices=[c.value for c in BandCenter], default="median")
    lift_p.add_argument("--band-halfwidth-mm", type=float, default=300.0)
    lift_p.add_argument("--no-band", action="store_true", help="disable depth-band filtering")
    lift_p.add_argument("--no-background", action="store_true", help="skip the background cloud")
    lift_p.add_argument(
        "--overlap", choices=[p.value for p in OverlapPolicy], default="first-wins"
    )
    lift_p.add_argument("--units", choices=[u.value for u in Units], default="mm")

    measure_p = sub.add_parser("measure", help="axis-aligned extent of a PLY cloud")
    measure_p.add_argument("--cloud", required=True, help="ASCII PLY file")
    measure_p.add_argument("--axis", required=True, choices=[a.value for a in Axis])
    measure_p.add_argument("--trim", type=float, default=DEFAULT_TRIM,
                           help="fraction trimmed per tail (0 = raw max-min)")

    synth_p = sub.add_parser("synth", help="generate a synthetic scene with ground truth")
    shape_sub = synth_p.add_subparsers(dest="shape", required=True)

    box_p = shape_sub.add_parser("box", help="fronto-parallel rectangular face")
    box_p.add_argument("--width-mm", type=float, required=True)
    box_p.add_argument("--height-mm", type=float, required=True)
    box_p.add_argument("--depth-mm", type=float, required=True, help="face plane depth")
    box_p.add_argument("--offset-x-mm", type=float, default=0.0)
    box_p.add_argument("--offset-y-mm", type=float, default=0.0)
    _add_synth_common(box_p)

    sphere_p = shape_sub.add_parser("sphere", help="sphere (depth-convention probe)")
    sphere_p.add_argument("--center-x-mm", type=float, default=0.0)
    sphere_p.add_argument("--center-y-mm", type=float, default=0.0)
    sphere_p.add_argument("--center-z-mm", type=float, required=True)
    sphere_p.add_argument("--radius-mm", type=float, required=True)
    _add_synth_common(sphere_p)

    return parser


def _resolve_lift_inputs(args) -> tuple[Path, Path, Path, Path]:
    individual = [args.color, args.depth, args.intrinsics, args.masks]
    if args.scene is not None:
        if any(p is not None for p in individual):
            raise RgbdLiftError("--scene and individual input paths are mutually exclusive")
        scene = Path(args.scene)
        return (
            scene / "color.png",
            scene / "depth.png",
            scene / "intrinsics.json",
            scene / "manifest.json",
        )
    if any(p is None for p in individual):
        raise RgbdLiftError("provide --scene or all of --color --depth --intrinsics --masks")
    return tuple(Path(p) for p in individual)


def _scene_report(cfg: LiftConfig, units: Units, result, files: dict[int, str]) -> dict:
    band_cfg = None
    if cfg.band is not None:
        band_cfg = {
            "center": cfg.band.center_mode.value,
            "half_width_mm": cfg.band.half_width_mm,
        }
    instances = []
    for st in result.stats:
        band_used = None
        if st.band is not None:
            band_used = {
                "center_mm": st.band.center_mm,
                "lo_mm": st.band.lo,
                "hi_mm": st.band.hi,
            }
        instances.append(
            {
                "id": st.id,
                "class_name": st.class_name,
                "masked": st.masked,
                "invalid_depth": st.invalid_depth,
                "band_rejected": st.band_rejected,
                "overlap_dropped": st.overlap_dropped,
                "kept": st.kept,
                "band": band_used,
                "file": files.get(st.id),
                "error": st.error,
            }
        )
    background = None
    if result.background is not None:
        background = {"points": len(result.background), "file": "background.ply"}
    return {
        "config": {
            "depth_model": cfg.depth_model.value,
            "band": band_cfg,
            "overlap": cfg.overlap.value,
            "emit_background": cfg.emit_background,
            "units": units.value,
        },
        "instances": instances,
        "background": background,
    }


def _cmd_lift(args) -> int:
    color_path, depth_path, intr_path, manifest_path = _resolve_lift_inputs(args)
    intr = CameraIntrinsics.load(intr_path)
    color = load_color(color_path)
    depth = load_depth(depth_path, intr)
    validate_alignment(color, depth)
    _, masks = load_manifest(manifest_path)

    cfg = LiftConfig(
        depth_model=DepthModel(args.depth_model),
        band=None if args.no_band else BandConfig(
            center_mode=BandCenter(args.band_center),
            half_width_mm=args.band_halfwidth_mm,
        ),
        emit_background=not args.no_background,
        overlap=OverlapPolicy(args.overlap),
    )
    started = time.perf_counter()
    result = lift_scene(color, depth, masks, intr, cfg)
    elapsed = time.perf_counter() - started

    units = Units(args.units)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files: dict[int, str] = {}
    for inst in result.instances:
        name = f"instance_{inst.id}_{_safe_name(inst.class_name)}.ply"
        export_ply(inst.cloud, out / name, units)
        files[inst.id] = name
    if result.background is not None:
        export_ply(result.background, out / "background.ply", units)
    _write_json_atomic(_scene_report(cfg, units, result, files), out / "scene.json")

    failures = [st for st in result.stats if st.error is not None]
    for st in failures:
        print(f"instance {st.id} ({st.class_name}) failed: {st.error}", file=sys.stderr)
    print(
        f"lifted {len(result.instances)} instance(s) in {elapsed:.3f}s -> {out}",
        file=sys.stderr,
    )
    return 3 if failures else 0


def _cmd_measure(args) -> int:
    if not 0.0 <= args.trim < 0.5:
        raise RgbdLiftError(f"--trim must be in [0, 0.5), got {args.trim}")
    cloud = import_ply(args.cloud)
    report = measure_extent(cloud, Axis(args.axis), args.trim)
    print(
        f"axis={report.axis.value} extent_mm={_fmt(report.extent_mm)} "
        f"points={report.point_count} trim={_fmt(report.trim_fraction)}"
    )
    return 0


def _intrinsics_from_args(args) -> CameraIntrinsics:
    cx = args.cx if args.cx is not None else args.image_width / 2.0
    cy = args.cy if args.cy is not None else args.image_height / 2.0
    return CameraIntrinsics(
        fx=args.fx,
        fy=args.fy,
        cx=cx,
        cy=cy,
        width=args.image_width,
        height=args.image_height,
        depth_scale=args.depth_scale,
    )


def _cmd_synth(args) -> int:
    intr = _intrinsics_from_args(args)
    model = DepthModel(args.depth_model)
    if args.shape == "box":
        spec = BoxFaceSpec(
            width_mm=args.width_mm,
            height_mm=args.height_mm,
            center_depth_mm=args.depth_mm,
            offset_x_mm=args.offset_x_mm,
            offset_y_mm=args.offset_y_mm,
        )
        scene = render_box(spec, intr, args.background_depth_mm, model,
                           jitter_mm=args.jitter_mm, seed=args.seed)
    else:
        spec = SphereSpec(
            center_mm=(args.center_x_mm, args.center_y_mm, args.center_z_mm),
            radius_mm=args.radius_mm,
        )
        scene = render_sphere(spec, intr, args.background_depth_mm, model,
                              jitter_mm=args.jitter_mm, seed=args.seed)
    write_scene(scene, args.out)
    print(f"scene written to {args.out}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"lift": _cmd_lift, "measure": _cmd_measure, "synth": _cmd_synth}
    try:
        return handlers[args.command](args)
    except (RgbdLiftError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
