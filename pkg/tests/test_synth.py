"""Synthetic scene generation: rasterization counts, depth encoding
exactness, the sphere depth-convention probe, and interchange round
trips.

Radial residual bound for the sphere: a stored depth is off by at most
half a depth unit, the reconstructed point slides along its exact ray
by that amount, and | |p-c| - r | <= |p - p*|, so the residual is
bounded by 0.5 * depth_scale.
"""

import json

import numpy as np
import pytest

from rgbdlift import (
    BoxFaceSpec,
    CameraIntrinsics,
    DepthModel,
    LiftConfig,
    SphereSpec,
    lift_instance,
    load_color,
    load_depth,
    load_manifest,
    render_box,
    render_sphere,
    write_scene,
)
from rgbdlift.errors import OutOfFrustumError
from rgbdlift.synth import BACKGROUND_COLOR

NO_BAND = LiftConfig(band=None)


def intr(fx=600.0, fy=600.0, width=640, height=480, depth_scale=1.0):
    return CameraIntrinsics(
        fx=fx, fy=fy, cx=width / 2, cy=height / 2,
        width=width, height=height, depth_scale=depth_scale,
    )


def radial_residuals(scene, model):
    """| ||p - c|| - r | for every lifted sphere point."""
    cloud = lift_instance(
        scene.color, scene.depth, scene.masks[0], scene.intrinsics,
        LiftConfig(band=None, depth_model=model),
    )
    truth = scene.ground_truth[0]
    center = np.array([0.0, 0.0, truth.center_depth_mm])
    radius = truth.width_mm / 2
    distances = np.linalg.norm(cloud.points - center, axis=1)
    return np.abs(distances - radius)


class TestRenderBox:
    def test_rasterized_column_count(self):
        # 203 mm * 600 px / 1000 mm = 121.8 px of coverage -> pixel
        # centers at u in [-60, 60], i.e. 121 columns.
        scene = render_box(
            BoxFaceSpec(width_mm=203.0, height_mm=260.0, center_depth_mm=1000.0),
            intr(), 2500.0,
        )
        cols = np.unique(np.nonzero(scene.masks[0].bitmap)[1])
        assert cols.size == 121
        assert cols.min() == 320 - 60 and cols.max() == 320 + 60

    def test_one_pixel_face(self):
        scene = render_box(
            BoxFaceSpec(width_mm=1.0, height_mm=1.0, center_depth_mm=1000.0),
            intr(), 2500.0,
        )
        rows, cols = np.nonzero(scene.masks[0].bitmap)
        assert cols.tolist() == [320] and rows.tolist() == [240]

    def test_planar_face_depth_stored_exactly(self):
        scene = render_box(
            BoxFaceSpec(width_mm=100.0, height_mm=100.0, center_depth_mm=1000.0),
            intr(depth_scale=0.25), 2500.0,
        )
        face = scene.masks[0].bitmap
        assert (scene.depth.samples[face] == 4000).all()  # 1000 mm / 0.25
        assert (scene.depth.samples[~face] == 10000).all()

    def test_ray_encoding_increases_off_axis(self):
        scene = render_box(
            BoxFaceSpec(width_mm=203.0, height_mm=203.0, center_depth_mm=1000.0),
            intr(), 2500.0, DepthModel.RAY_DISTANCE,
        )
        face = scene.masks[0].bitmap
        center_value = scene.depth.samples[240, 320]
        assert center_value == 1000
        assert scene.depth.samples[face].max() > 1000  # edges store ray length

    def test_mask_exactness(self):
        spec = BoxFaceSpec(width_mm=150.0, height_mm=80.0, center_depth_mm=1200.0)
        scene = render_box(spec, intr(), 3000.0)
        face = scene.masks[0].bitmap
        assert (scene.depth.samples[face] == 1200).all()
        assert (scene.depth.samples[~face] == 3000).all()
        assert (scene.color.pixels[face] == spec.color).all()
        assert (scene.color.pixels[~face] == BACKGROUND_COLOR).all()

    def test_face_wider_than_frustum_rejected(self):
        with pytest.raises(OutOfFrustumError):
            render_box(
                BoxFaceSpec(width_mm=1200.0, height_mm=100.0, center_depth_mm=1000.0),
                intr(), 2500.0,
            )

    def test_background_must_be_behind(self):
        with pytest.raises(OutOfFrustumError):
            render_box(
                BoxFaceSpec(width_mm=100.0, height_mm=100.0, center_depth_mm=1000.0),
                intr(), 900.0,
            )

    def test_offset_moves_face(self):
        scene = render_box(
            BoxFaceSpec(
                width_mm=100.0, height_mm=100.0, center_depth_mm=1000.0,
                offset_x_mm=200.0,
            ),
            intr(), 2500.0,
        )
        cols = np.nonzero(scene.masks[0].bitmap)[1]
        assert cols.mean() > 320

    def test_zero_width_rejected(self):
        with pytest.raises(ValueError):
            BoxFaceSpec(width_mm=0.0, height_mm=100.0, center_depth_mm=1000.0)


class TestRenderSphere:
    SPEC = SphereSpec(center_mm=(0.0, 0.0, 1000.0), radius_mm=150.0)

    def test_on_axis_depth_both_models(self):
        for model in DepthModel:
            scene = render_sphere(
                SphereSpec(center_mm=(0.0, 0.0, 1000.0), radius_mm=100.0),
                intr(), 2500.0, model,
            )
            assert scene.depth.samples[240, 320] == 900

    def test_matching_model_reconstructs_radius(self):
        scene = render_sphere(self.SPEC, intr(), 2500.0, DepthModel.RAY_DISTANCE)
        residuals = radial_residuals(scene, DepthModel.RAY_DISTANCE)
        assert residuals.max() <= 0.5 + 1e-9

    def test_wrong_model_exceeds_quantization(self):
        scene = render_sphere(self.SPEC, intr(), 2500.0, DepthModel.RAY_DISTANCE)
        mismatched = radial_residuals(scene, DepthModel.PLANAR_Z)
        matched = radial_residuals(scene, DepthModel.RAY_DISTANCE)
        assert mismatched.max() > matched.max()
        assert mismatched.max() > 0.5

    def test_planar_encoding_reconstructs_under_planar(self):
        scene = render_sphere(self.SPEC, intr(), 2500.0, DepthModel.PLANAR_Z)
        residuals = radial_residuals(scene, DepthModel.PLANAR_Z)
        assert residuals.max() <= 0.5 + 1e-9

    def test_behind_background_rejected(self):
        with pytest.raises(OutOfFrustumError):
            render_sphere(self.SPEC, intr(), 1100.0)

    def test_silhouette_touching_border_rejected(self):
        with pytest.raises(OutOfFrustumError):
            render_sphere(
                SphereSpec(center_mm=(0.0, 0.0, 700.0), radius_mm=400.0),
                intr(), 2500.0,
            )

    def test_sphere_fully_offscreen_rejected(self):
        with pytest.raises(OutOfFrustumError):
            render_sphere(
                SphereSpec(center_mm=(0.0, 0.0, 1000.0), radius_mm=150.0),
                CameraIntrinsics(fx=600, fy=600, cx=0.0, cy=0.0, width=64, height=64),
                2500.0,
            )

    def test_center_z_must_exceed_radius(self):
        with pytest.raises(ValueError):
            SphereSpec(center_mm=(0.0, 0.0, 100.0), radius_mm=150.0)


class TestJitter:
    def test_deterministic_for_fixed_seed(self):
        spec = BoxFaceSpec(width_mm=100.0, height_mm=100.0, center_depth_mm=1000.0)
        a = render_box(spec, intr(), 2500.0, jitter_mm=5.0, seed=7)
        b = render_box(spec, intr(), 2500.0, jitter_mm=5.0, seed=7)
        np.testing.assert_array_equal(a.depth.samples, b.depth.samples)

    def test_seed_changes_samples(self):
        spec = BoxFaceSpec(width_mm=100.0, height_mm=100.0, center_depth_mm=1000.0)
        a = render_box(spec, intr(), 2500.0, jitter_mm=5.0, seed=7)
        b = render_box(spec, intr(), 2500.0, jitter_mm=5.0, seed=8)
        assert (a.depth.samples != b.depth.samples).any()

    def test_jitter_bounded(self):
        spec = BoxFaceSpec(width_mm=100.0, height_mm=100.0, center_depth_mm=1000.0)
        scene = render_box(spec, intr(), 2500.0, jitter_mm=3.0, seed=1)
        face = scene.masks[0].bitmap
        assert abs(scene.depth.samples[face].astype(int) - 1000).max() <= 4


class TestWriteScene:
    def test_round_trip_through_loaders(self, tmp_path):
        scene = render_box(
            BoxFaceSpec(width_mm=203.0, height_mm=260.0, center_depth_mm=1000.0),
            intr(), 2500.0,
        )
        write_scene(scene, tmp_path)

        loaded_intr = CameraIntrinsics.load(tmp_path / "intrinsics.json")
        assert loaded_intr == scene.intrinsics
        color = load_color(tmp_path / "color.png")
        np.testing.assert_array_equal(color.pixels, scene.color.pixels)
        depth = load_depth(tmp_path / "depth.png", loaded_intr)
        np.testing.assert_array_equal(depth.samples, scene.depth.samples)
        manifest, masks = load_manifest(tmp_path / "manifest.json")
        assert len(masks) == len(scene.masks) == 1
        np.testing.assert_array_equal(masks[0].bitmap, scene.masks[0].bitmap)
        assert manifest.instances[0].class_name == "box"

    def test_depth_png_is_16_bit(self, tmp_path):
        scene = render_box(
            BoxFaceSpec(width_mm=100.0, height_mm=100.0, center_depth_mm=1000.0),
            intr(), 2500.0,
        )
        write_scene(scene, tmp_path)
        header = (tmp_path / "depth.png").read_bytes()
        assert header[24] == 16 and header[25] == 0  # bit depth, grayscale

    def test_ground_truth_contents(self, tmp_path):
        scene = render_sphere(
            SphereSpec(center_mm=(0.0, 0.0, 1500.0), radius_mm=100.0),
            intr(), 2500.0,
        )
        write_scene(scene, tmp_path)
        doc = json.loads((tmp_path / "ground_truth.json").read_text())
        assert doc == {
            "objects": [
                {
                    "id": 1,
                    "class_name": "sphere",
                    "width_mm": 200.0,
                    "height_mm": 200.0,
                    "center_depth_mm": 1500.0,
                }
            ]
        }
