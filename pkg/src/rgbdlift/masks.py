"""Per-instance Boolean masks: manifest ingestion, contour extraction,
region enumeration, and mask combination.

Masks are Boolean grids the shape of the frame: True marks object
pixels, False marks "no object here".  On disk a mask is an 8-bit
grayscale PNG holding only 0 and 255; the manifest is a JSON file
naming each instance's id, class label, confidence score and mask file.

Pixel coordinates throughout are (col, row) pairs.

Contours are traced with Moore-neighbor border following over
8-connected components: thin diagonal structures common in neural
masks stay one component instead of splitting.  A contour's
``enclosed_area`` is the component's *pixel count* (holes excluded),
since the region feeds per-pixel lifting where membership, not polygon
geometry, is what matters.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import (
    DimensionMismatchError,
    DuplicateIdError,
    FormatError,
    NonBinaryMaskError,
    SchemaError,
)
from .frames import _read_ihdr


@dataclass(frozen=True)
class InstanceMask:
    """One detected object: id, class label, confidence and pixel mask."""

    id: int
    class_name: str
    score: float
    bitmap: np.ndarray

    def __post_init__(self):
        if self.bitmap.ndim != 2 or self.bitmap.dtype != np.bool_:
            raise ValueError(
                f"bitmap must be a 2-D bool array, got {self.bitmap.dtype} {self.bitmap.shape}"
            )
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score must be in [0, 1], got {self.score}")


@dataclass(frozen=True)
class ManifestEntry:
    id: int
    class_name: str
    score: float
    mask_file: str


@dataclass(frozen=True)
class MaskManifest:
    """Interchange record between the mask producer and the lifter."""

    color_image: str
    instances: tuple[ManifestEntry, ...]


@dataclass(frozen=True)
class Contour:
    """Closed boundary pixel chain of one connected mask region.

    ``points`` are (col, row) pairs; consecutive points (and last to
    first) are 8-connected.  ``enclosed_area`` counts the component's
    pixels.
    """

    points: tuple[tuple[int, int], ...]
    enclosed_area: int


_ENTRY_KEYS = {"id", "class_name", "score", "mask_file"}


def _check_entry(raw: dict, index: int) -> ManifestEntry:
    if not isinstance(raw, dict):
        raise SchemaError(f"instances[{index}] must be an object, got {type(raw).__name__}")
    unknown = set(raw) - _ENTRY_KEYS
    if unknown:
        raise SchemaError(f"instances[{index}]: unknown keys {sorted(unknown)}")
    missing = _ENTRY_KEYS - set(raw)
    if missing:
        raise SchemaError(f"instances[{index}]: missing keys {sorted(missing)}")
    id_ = raw["id"]
    if isinstance(id_, bool) or not isinstance(id_, int) or id_ < 1:
        raise SchemaError(f"instances[{index}]: id must be a positive integer, got {id_!r}")
    if not isinstance(raw["class_name"], str):
        raise SchemaError(f"instances[{index}]: class_name must be a string")
    score = raw["score"]
    if isinstance(score, bool) or not isinstance(score, (int, float)) or not 0 <= score <= 1:
        raise SchemaError(f"instances[{index}]: score must be a number in [0, 1], got {score!r}")
    if not isinstance(raw["mask_file"], str):
        raise SchemaError(f"instances[{index}]: mask_file must be a string")
    return ManifestEntry(
        id=id_, class_name=raw["class_name"], score=float(score), mask_file=raw["mask_file"]
    )


def load_mask_png(path) -> np.ndarray:
    """Decode a strictly bi-level 8-bit grayscale PNG into a bool grid."""
    _, _, bit_depth, color_type = _read_ihdr(path)
    if bit_depth != 8 or color_type != 0:
        raise FormatError(
            f"{path}: mask PNG must be 8-bit grayscale, got "
            f"{bit_depth}-bit PNG color type {color_type}"
        )
    with Image.open(path) as img:
        arr = np.asarray(img)
    bad = (arr != 0) & (arr != 255)
    if bad.any():
        value = int(arr[bad][0])
        raise NonBinaryMaskError(f"{path}: mask contains value {value}, only 0 and 255 allowed")
    return arr == 255


def write_mask_png(bitmap: np.ndarray, path) -> None:
    arr = np.where(bitmap, 255, 0).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path, format="PNG")


def load_manifest(path) -> tuple[MaskManifest, list[InstanceMask]]:
    """Load a manifest JSON plus every mask it names.

    Mask files resolve relative to the manifest's directory.
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SchemaError(f"{path}: manifest must be a JSON object")
    unknown = set(data) - {"color_image", "instances"}
    if unknown:
        raise SchemaError(f"{path}: unknown keys {sorted(unknown)}")
    if "color_image" not in data or not isinstance(data["color_image"], str):
        raise SchemaError(f"{path}: color_image must be a string")
    if "instances" not in data or not isinstance(data["instances"], list):
        raise SchemaError(f"{path}: instances must be a list")

    entries = [_check_entry(raw, i) for i, raw in enumerate(data["instances"])]
    seen: set[int] = set()
    for entry in entries:
        if entry.id in seen:
            raise DuplicateIdError(f"{path}: duplicate instance id {entry.id}")
        seen.add(entry.id)

    manifest = MaskManifest(color_image=data["color_image"], instances=tuple(entries))
    masks = [
        InstanceMask(
            id=e.id,
            class_name=e.class_name,
            score=e.score,
            bitmap=load_mask_png(path.parent / e.mask_file),
        )
        for e in entries
    ]
    return manifest, masks


# Moore neighborhood in clockwise order starting due west, as
# (drow, dcol): W, NW, N, NE, E, SE, S, SW.
_MOORE = ((0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1))
_MOORE_INDEX = {off: i for i, off in enumerate(_MOORE)}


def _trace_step(bitmap: np.ndarray, state):
    """One Moore-trace move: clockwise scan around ``cur`` starting just
    past the backtrack pixel.  Returns the next (cur, back) state, or
    None for an isolated pixel."""
    h, w = bitmap.shape
    cur, back = state
    back_idx = _MOORE_INDEX[(back[0] - cur[0], back[1] - cur[1])]
    for step in range(1, 9):
        idx = (back_idx + step) % 8
        r, c = cur[0] + _MOORE[idx][0], cur[1] + _MOORE[idx][1]
        if 0 <= r < h and 0 <= c < w and bitmap[r, c]:
            prev = (back_idx + step - 1) % 8
            new_back = (cur[0] + _MOORE[prev][0], cur[1] + _MOORE[prev][1])
            return (r, c), new_back
    return None


def _trace_boundary(bitmap: np.ndarray, start_row: int, start_col: int) -> list[tuple[int, int]]:
    """Moore-neighbor border following from a component's first
    row-major pixel.

    The trace is a deterministic walk over (pixel, backtrack) states, so
    its eventual cycle *is* the closed boundary; walking until a state
    repeats and keeping the cycle handles boundaries that pass through
    the start pixel more than once (thin diagonals, pinched shapes).
    """
    start = (start_row, start_col)
    # The west neighbor of a row-major-first pixel is always background.
    state = (start, (start_row, start_col - 1))
    seen: dict[tuple, int] = {}
    seq: list[tuple] = []
    while state not in seen:
        seen[state] = len(seq)
        seq.append(state)
        nxt = _trace_step(bitmap, state)
        if nxt is None:
            return [(start_col, start_row)]  # isolated pixel
        state = nxt
    cycle = seq[seen[state]:]
    pixels = [s[0] for s in cycle]
    offset = pixels.index(start)  # boundary cycles pass through their start pixel
    pixels = pixels[offset:] + pixels[:offset]
    return [(c, r) for r, c in pixels]


def _flood_component(bitmap: np.ndarray, labels: np.ndarray, seed: tuple[int, int], label: int) -> int:
    """BFS over the 8-connected component at seed; returns its size."""
    h, w = bitmap.shape
    queue = deque([seed])
    labels[seed] = label
    size = 0
    while queue:
        r, c = queue.popleft()
        size += 1
        for dr, dc in _MOORE:
            nr, nc = r + dr, c + dc
            if 0 <= nr < h and 0 <= nc < w and bitmap[nr, nc] and labels[nr, nc] == 0:
                labels[nr, nc] = label
                queue.append((nr, nc))
    return size


def find_contours(mask: InstanceMask) -> list[Contour]:
    """One Contour per 8-connected foreground component.

    Components are reported in row-major order of their first pixel;
    an all-false bitmap yields an empty list.
    """
    bitmap = mask.bitmap
    labels = np.zeros(bitmap.shape, dtype=np.int32)
    contours: list[Contour] = []
    # argwhere scans row-major, so each component is first met at the
    # pixel the boundary trace must start from.
    for r, c in np.argwhere(bitmap):
        if labels[r, c] != 0:
            continue
        size = _flood_component(bitmap, labels, (int(r), int(c)), len(contours) + 1)
        points = _trace_boundary(bitmap, int(r), int(c))
        contours.append(Contour(points=tuple(points), enclosed_area=size))
    return contours


def region_pixels(mask: InstanceMask) -> list[tuple[int, int]]:
    """All true pixels as (col, row), in row-major order."""
    rc = np.argwhere(mask.bitmap)
    return [(int(c), int(r)) for r, c in rc]


def _as_bitmap(m) -> np.ndarray:
    return m.bitmap if isinstance(m, InstanceMask) else np.asarray(m, dtype=bool)


def mask_union(masks, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Pixelwise OR of instance masks (or raw bool grids).

    ``shape`` is (height, width), required to give the empty union a
    size.  Mixed dimensions raise DimensionMismatchError.
    """
    bitmaps = [_as_bitmap(m) for m in masks]
    if not bitmaps:
        if shape is None:
            raise ValueError("mask_union of nothing needs an explicit shape")
        return np.zeros(shape, dtype=bool)
    first = bitmaps[0].shape
    if shape is not None and first != tuple(shape):
        raise DimensionMismatchError(f"masks are {first}, expected {tuple(shape)}")
    out = np.zeros(first, dtype=bool)
    for b in bitmaps:
        if b.shape != first:
            raise DimensionMismatchError(f"mask dimensions differ: {b.shape} vs {first}")
        out |= b
    return out
