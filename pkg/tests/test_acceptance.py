"""End-to-end acceptance suite.

Each test implements one release criterion at its stated tolerance; a
conftest hook prints one PASS/FAIL line per criterion.  Everything
runs on synthetic scenes with analytic ground truth: no sensor, no
pretrained model, no network.
"""

import json
import time

import numpy as np
import pytest

from rgbdlift import (
    BandConfig,
    CameraIntrinsics,
    DepthModel,
    InstanceMask,
    LiftConfig,
    PointCloud,
    SphereSpec,
    back_project_pixels,
    export_ply,
    find_contours,
    import_ply,
    lift_instance,
    lift_scene,
    load_depth,
    load_manifest,
    project_points,
    render_sphere,
    write_scene,
)
from rgbdlift.cli import main as cli_main
from rgbdlift.frames import load_color

from conftest import make_color, make_depth, make_mask
from test_masks import brute_components

MEASURE_TOL_MM = 2 * 1000.0 / 600.0  # two pixels of rasterization at z=1000, f=600


def run_cli(argv):
    try:
        return cli_main([str(a) for a in argv])
    except SystemExit as exc:
        return exc.code


def pixels_of(cloud: PointCloud, intr: CameraIntrinsics) -> set:
    """Recover (col, row) for every point via the exact forward
    projection; the independent check that clouds never share a pixel."""
    if len(cloud) == 0:
        return set()
    cols, rows, _ = project_points(cloud.points, intr, DepthModel.PLANAR_Z)
    return {(int(round(c)), int(round(r))) for c, r in zip(cols, rows)}


class TestDimensionAccuracy:
    """Desk-scale dimension study: synth box -> lift -> measure."""

    @staticmethod
    @pytest.fixture(scope="class", autouse=True)
    def warm_pipeline(tmp_path_factory):
        # One throwaway lift so one-time interpreter/import costs don't
        # land inside the timed runs.
        base = tmp_path_factory.mktemp("warmup")
        run_cli(["synth", "box", "--width-mm", 50, "--height-mm", 50,
                 "--depth-mm", 1000, "--image-width", 32, "--image-height", 32,
                 "--out", base / "scene"])
        run_cli(["lift", "--scene", base / "scene", "--out", base / "out"])

    @pytest.mark.parametrize(
        "width_mm,height_mm",
        [(203.0, 260.0), (126.0, 180.0), (76.0, 120.0)],
        ids=["book-width", "bottle-width", "cup-width"],
    )
    def test_extents_within_two_pixels(self, tmp_path, capsys, width_mm, height_mm):
        """measured object extents match ground truth within +/-3.33 mm, < 1 s per scene"""
        scene = tmp_path / "scene"
        out = tmp_path / "out"
        assert run_cli(
            ["synth", "box", "--width-mm", width_mm, "--height-mm", height_mm,
             "--depth-mm", 1000, "--out", scene]
        ) == 0

        started = time.perf_counter()
        assert run_cli(["lift", "--scene", scene, "--out", out]) == 0
        elapsed = time.perf_counter() - started
        assert elapsed < 1.0, f"lift took {elapsed:.2f}s"

        capsys.readouterr()
        truth = json.loads((scene / "ground_truth.json").read_text())["objects"][0]
        for axis, expected in (("x", truth["width_mm"]), ("y", truth["height_mm"])):
            assert run_cli(
                ["measure", "--cloud", out / "instance_1_box.ply",
                 "--axis", axis, "--trim", 0]
            ) == 0
            line = capsys.readouterr().out.strip()
            fields = dict(kv.split("=") for kv in line.split())
            measured = float(fields["extent_mm"])
            assert abs(measured - expected) <= MEASURE_TOL_MM, (
                f"axis {axis}: measured {measured}, true {expected}"
            )


class TestProjectionRoundTrip:
    def test_ten_thousand_random_samples(self):
        """project(back_project(pixel, depth)) is the identity to 1e-9 relative, both models"""
        rng = np.random.default_rng(2024)
        per_cam = 100
        for _ in range(100):
            width = int(rng.integers(16, 1280))
            height = int(rng.integers(16, 1024))
            intr = CameraIntrinsics(
                fx=float(rng.uniform(50, 2000)),
                fy=float(rng.uniform(50, 2000)),
                cx=float(rng.uniform(0, width - 1)),
                cy=float(rng.uniform(0, height - 1)),
                width=width,
                height=height,
            )
            cols = rng.integers(0, width, size=per_cam)
            rows = rng.integers(0, height, size=per_cam)
            depths = rng.uniform(100, 10000, size=per_cam)
            for model in DepthModel:
                pts = back_project_pixels(cols, rows, depths, intr, model)
                c2, r2, d2 = project_points(pts, intr, model)
                np.testing.assert_allclose(c2, cols, rtol=1e-9, atol=1e-9)
                np.testing.assert_allclose(r2, rows, rtol=1e-9, atol=1e-9)
                np.testing.assert_allclose(d2, depths, rtol=1e-9)


class TestDepthModelDiscrimination:
    def test_sphere_probe_separates_models(self, tmp_path):
        """ray-encoded sphere: matching model within 1 mm + quantization, planar model exceeds it"""
        intr = CameraIntrinsics(
            fx=600.0, fy=600.0, cx=320.0, cy=240.0, width=640, height=480
        )
        scene = render_sphere(
            SphereSpec(center_mm=(0.0, 0.0, 1000.0), radius_mm=150.0),
            intr, 2500.0, DepthModel.RAY_DISTANCE,
        )
        write_scene(scene, tmp_path)

        # Reconstruct from the files, not the in-memory scene.
        loaded_intr = CameraIntrinsics.load(tmp_path / "intrinsics.json")
        color = load_color(tmp_path / "color.png")
        depth = load_depth(tmp_path / "depth.png", loaded_intr)
        _, masks = load_manifest(tmp_path / "manifest.json")
        center = np.array([0.0, 0.0, 1000.0])
        radius = 150.0
        bound = 1.0 + 0.5 * loaded_intr.depth_scale

        residuals = {}
        for model in DepthModel:
            cloud = lift_instance(
                color, depth, masks[0], loaded_intr,
                LiftConfig(band=None, depth_model=model),
            )
            dist = np.linalg.norm(cloud.points - center, axis=1)
            residuals[model] = np.abs(dist - radius).max()

        assert residuals[DepthModel.RAY_DISTANCE] <= bound
        assert residuals[DepthModel.PLANAR_Z] > bound


class TestPartition:
    def test_fifty_random_scenes(self):
        """band-disabled lift partitions the valid-depth pixels exactly, no pixel in two clouds"""
        rng = np.random.default_rng(99)
        cfg = LiftConfig(band=None)
        for scene_idx in range(50):
            h = int(rng.integers(8, 40))
            w = int(rng.integers(8, 40))
            intr = CameraIntrinsics(
                fx=float(rng.uniform(20, 200)),
                fy=float(rng.uniform(20, 200)),
                cx=float(rng.uniform(0, w - 1)),
                cy=float(rng.uniform(0, h - 1)),
                width=w,
                height=h,
            )
            samples = rng.integers(0, 3000, size=(h, w)).astype(np.uint16)
            samples[rng.random((h, w)) < 0.1] = 0
            depth = make_depth(samples)
            masks = []
            for i in range(int(rng.integers(0, 5))):
                bits = rng.random((h, w)) < rng.uniform(0.05, 0.5)
                masks.append(make_mask(bits, id=i + 1))
            result = lift_scene(make_color(h, w), depth, masks, intr, cfg)

            valid_count = int(depth.valid().sum())
            total = sum(len(i.cloud) for i in result.instances) + len(result.background)
            assert total == valid_count, f"scene {scene_idx}: {total} != {valid_count}"

            clouds = [i.cloud for i in result.instances] + [result.background]
            pixel_sets = [pixels_of(c, intr) for c in clouds]
            assert sum(len(s) for s in pixel_sets) == valid_count
            merged = set().union(*pixel_sets) if pixel_sets else set()
            assert len(merged) == valid_count  # no pixel appears twice


class TestBandRejection:
    def test_dilated_mask_sheds_background_pixels(self, tmp_path):
        """every background-depth pixel inside a dilated mask is banded out and lands in the background cloud"""
        scene_dir = tmp_path / "scene"
        assert run_cli(
            ["synth", "box", "--width-mm", 203, "--height-mm", 260,
             "--depth-mm", 1000, "--background-depth-mm", 2500, "--out", scene_dir]
        ) == 0
        intr = CameraIntrinsics.load(scene_dir / "intrinsics.json")
        color = load_color(scene_dir / "color.png")
        depth = load_depth(scene_dir / "depth.png", intr)
        _, masks = load_manifest(scene_dir / "manifest.json")

        # Dilate the mask by 3 pixels of 8-neighborhood growth so it
        # swallows a ring of background-plane pixels.
        bits = masks[0].bitmap.copy()
        for _ in range(3):
            grown = bits.copy()
            grown[1:, :] |= bits[:-1, :]
            grown[:-1, :] |= bits[1:, :]
            grown[:, 1:] |= bits[:, :-1]
            grown[:, :-1] |= bits[:, 1:]
            grown[1:, 1:] |= bits[:-1, :-1]
            grown[1:, :-1] |= bits[:-1, 1:]
            grown[:-1, 1:] |= bits[1:, :-1]
            grown[:-1, :-1] |= bits[1:, 1:]
            bits = grown
        dilated = InstanceMask(id=1, class_name="box", score=1.0, bitmap=bits)
        contaminated = bits & (depth.millimeters() == 2500.0)
        assert contaminated.sum() > 0  # the dilation did reach the background

        result = lift_scene(color, depth, [dilated], intr, LiftConfig())
        instance_pixels = pixels_of(result.instances[0].cloud, intr)
        background_pixels = pixels_of(result.background, intr)
        far = {(int(c), int(r)) for r, c in np.argwhere(contaminated)}
        assert far & instance_pixels == set()
        assert far <= background_pixels
        assert result.stats[0].band_rejected == int(contaminated.sum())


class TestContourOracle:
    def test_hundred_random_masks(self):
        """contour areas match brute-force 8-connected component sizes on 100 random masks"""
        rng = np.random.default_rng(7)
        for trial in range(100):
            h = int(rng.integers(1, 33))
            w = int(rng.integers(1, 33))
            bitmap = rng.random((h, w)) < rng.uniform(0.1, 0.9)
            contours = find_contours(make_mask(bitmap))
            comps = brute_components(bitmap)
            assert len(contours) == len(comps), f"trial {trial}"
            for contour, comp in zip(contours, comps):
                assert contour.enclosed_area == len(comp), f"trial {trial}"
            assert sum(c.enclosed_area for c in contours) == int(bitmap.sum())


class TestPlyRoundTrip:
    @pytest.mark.parametrize("n", [0, 1, 100_000], ids=["empty", "one", "1e5"])
    def test_export_import_identity(self, tmp_path, n):
        """PLY export/import preserves count, order, colors exactly; coordinates to float32"""
        rng = np.random.default_rng(n + 1)
        cloud = PointCloud(
            points=rng.uniform(-5000, 5000, size=(n, 3)),
            colors=rng.integers(0, 256, size=(n, 3), dtype=np.uint8),
        )
        path = tmp_path / "cloud.ply"
        export_ply(cloud, path)
        loaded = import_ply(path)
        assert len(loaded) == n
        np.testing.assert_array_equal(loaded.colors, cloud.colors)
        np.testing.assert_array_equal(
            loaded.points.astype(np.float32), cloud.points.astype(np.float32)
        )


class TestDeterminism:
    def test_two_lift_runs_byte_identical(self, tmp_path):
        """two identical lift invocations produce byte-identical output trees"""
        scene = tmp_path / "scene"
        assert run_cli(
            ["synth", "box", "--width-mm", 203, "--height-mm", 260,
             "--depth-mm", 1000, "--out", scene]
        ) == 0
        trees = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert run_cli(["lift", "--scene", scene, "--out", out]) == 0
            trees.append(
                {
                    str(p.relative_to(out)): p.read_bytes()
                    for p in sorted(out.rglob("*")) if p.is_file()
                }
            )
        assert trees[0].keys() == trees[1].keys()
        assert trees[0] == trees[1]
