import numpy as np
import pytest

from rgbdlift import CameraIntrinsics, ColorImage, DepthImage, InstanceMask


@pytest.fixture
def intr_vga():
    """The default desk-scale camera: 640x480, f=600, centered."""
    return CameraIntrinsics(fx=600.0, fy=600.0, cx=320.0, cy=240.0, width=640, height=480)


@pytest.fixture
def intr_tiny():
    """A 2x2 frame with f=100 and principal point at pixel (1, 1)."""
    return CameraIntrinsics(fx=100.0, fy=100.0, cx=1.0, cy=1.0, width=2, height=2)


def make_color(height, width, value=(10, 20, 30)):
    pixels = np.empty((height, width, 3), dtype=np.uint8)
    pixels[:] = value
    return ColorImage(pixels=pixels)


def make_depth(values, depth_scale=1.0):
    return DepthImage(samples=np.asarray(values, dtype=np.uint16), depth_scale=depth_scale)


def make_mask(bits, id=1, class_name="thing", score=1.0):
    return InstanceMask(
        id=id, class_name=class_name, score=score, bitmap=np.asarray(bits, dtype=bool)
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and item.path.name == "test_acceptance.py":
        status = "PASS" if rep.passed else "FAIL"
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        print(f"\n[acceptance] {status}: {doc}")
