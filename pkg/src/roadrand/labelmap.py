"""Semantic label rasters: erasure, polygon rasterization, compositing.

Labels are 2-D uint8 rasters of class ids.  Rasterization follows the
pixel-center even-odd rule: a pixel belongs to a polygon iff its center
(col + 0.5, row + 0.5) lies inside.  Labels are categorical, so there
is no anti-aliasing.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from . import geometry
from .geometry import CameraRig, NotVisibleError
from .markings import MarkingInstance, Palette, transform_to_ground
from .markings.shapes import clip_halfplane, polygon_area

# Ground points with homogeneous w below this are clipped away before
# projection; they would land within a fraction of a pixel of the
# horizon anyway.
_MIN_PROJECTIVE_W = 1e-6


@dataclass(frozen=True)
class LabelMap:
    """Immutable 2-D raster of class ids."""

    classes: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.classes)
        if arr.ndim != 2:
            raise ValueError(f"label raster must be 2-D, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if arr.min(initial=0) < 0 or arr.max(initial=0) > 255:
                raise ValueError("class ids must fit in uint8")
            arr = arr.astype(np.uint8)
        else:
            arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "classes", arr)

    @property
    def height(self) -> int:
        return self.classes.shape[0]

    @property
    def width(self) -> int:
        return self.classes.shape[1]

    def pixel_count(self, class_id: int) -> int:
        return int(np.count_nonzero(self.classes == class_id))


@dataclass(frozen=True)
class SceneClassConfig:
    """Which ids mean road, markings, and unlabelled pixels."""

    road_id: int
    marking_ids: frozenset[int]
    ignore_id: int = 255

    def __post_init__(self):
        object.__setattr__(self, "marking_ids", frozenset(int(i) for i in self.marking_ids))
        if self.road_id in self.marking_ids:
            raise ValueError("road_id must not be a marking id")
        if self.ignore_id == self.road_id or self.ignore_id in self.marking_ids:
            raise ValueError("ignore_id must be distinct from road and marking ids")

    def to_dict(self) -> dict:
        return {
            "road_id": self.road_id,
            "marking_ids": sorted(self.marking_ids),
            "ignore_id": self.ignore_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SceneClassConfig":
        return cls(
            road_id=int(d["road_id"]),
            marking_ids=frozenset(int(i) for i in d["marking_ids"]),
            ignore_id=int(d.get("ignore_id", 255)),
        )


def erase_markings(label: LabelMap, cfg: SceneClassConfig) -> LabelMap:
    """Replace every marking pixel with road surface."""
    raster = label.classes.copy()
    if cfg.marking_ids:
        mask = np.isin(raster, np.fromiter(cfg.marking_ids, dtype=np.uint8))
        raster[mask] = cfg.road_id
    return LabelMap(raster)


def fill_polygon_mask(vertices: np.ndarray, width: int, height: int) -> np.ndarray:
    """Scanline even-odd fill at pixel centers.

    Equivalent to testing every pixel center with a crossing-number
    point-in-polygon test; the scanline form only touches rows the
    polygon spans.
    """
    mask = np.zeros((height, width), dtype=bool)
    v = np.asarray(vertices, dtype=float)
    v1 = v
    v2 = np.roll(v, -1, axis=0)
    row_lo = max(0, int(np.ceil(v[:, 1].min() - 0.5)))
    row_hi = min(height - 1, int(np.floor(v[:, 1].max() - 0.5)))
    for row in range(row_lo, row_hi + 1):
        yc = row + 0.5
        crossing = (v1[:, 1] > yc) != (v2[:, 1] > yc)
        if not np.any(crossing):
            continue
        a, b = v1[crossing], v2[crossing]
        t = (yc - a[:, 1]) / (b[:, 1] - a[:, 1])
        xs = np.sort(a[:, 0] + t * (b[:, 0] - a[:, 0]))
        for x_in, x_out in zip(xs[0::2], xs[1::2]):
            # centers c + 0.5 in [x_in, x_out)
            c_lo = max(0, int(np.ceil(x_in - 0.5)))
            c_hi = min(width - 1, int(np.ceil(x_out - 0.5)) - 1)
            if c_hi >= c_lo:
                mask[row, c_lo : c_hi + 1] = True
    return mask


@dataclass(frozen=True)
class PlacementResult:
    """Outcome of rasterizing one marking instance."""

    label: LabelMap
    placed_mask: np.ndarray  # pixels actually written
    footprint_mask: np.ndarray  # in-image projected footprint, pre-occlusion
    dropped_polygons: int  # projected area < 1 px^2

    @property
    def placed_pixels(self) -> int:
        return int(np.count_nonzero(self.placed_mask))

    @property
    def footprint_pixels(self) -> int:
        return int(np.count_nonzero(self.footprint_mask))


def project_instance_polygons(
    instance: MarkingInstance, rig: CameraRig
) -> tuple[list[np.ndarray], int]:
    """Ground polygons of an instance projected to pixel coordinates.

    Polygons are clipped against the horizon before projection; parts
    beyond it are discarded.  Returns (pixel polygons, clipped-away
    polygon count).  Raises NotVisibleError when nothing survives.
    """
    h = geometry.ground_homography(rig.intrinsics, rig.pose)
    a, b, c = geometry.visibility_halfplane(h)
    pixel_polys = []
    lost = 0
    for poly in transform_to_ground(instance):
        clipped = clip_halfplane(poly, a, b, c - _MIN_PROJECTIVE_W)
        if clipped is None:
            lost += 1
            continue
        pixel_polys.append(geometry.project_points(clipped, h))
    if not pixel_polys:
        raise NotVisibleError(
            f"instance of {instance.marking_class.name!r} projects entirely "
            "at/above the horizon"
        )
    return pixel_polys, lost


def rasterize_instance(
    label: LabelMap, instance: MarkingInstance, rig: CameraRig, cfg: SceneClassConfig
) -> PlacementResult:
    """Project and fill an instance, writing only over road pixels.

    Writing only where the current id equals road_id realizes occlusion
    by scene objects and makes overlapping placements first-writer-wins.
    An empty placed mask (fully occluded or off-road) is not an error.
    """
    class_id = instance.marking_class.id
    if class_id == cfg.road_id or class_id == cfg.ignore_id:
        raise ValueError("instance class collides with scene road/ignore ids")
    pixel_polys, _ = project_instance_polygons(instance, rig)

    footprint = np.zeros((label.height, label.width), dtype=bool)
    dropped = 0
    for poly in pixel_polys:
        if abs(polygon_area(poly)) < 1.0:
            dropped += 1
            continue
        footprint |= fill_polygon_mask(poly, label.width, label.height)

    placed = footprint & (label.classes == cfg.road_id)
    raster = label.classes.copy()
    raster[placed] = class_id
    return PlacementResult(
        label=LabelMap(raster),
        placed_mask=placed,
        footprint_mask=footprint,
        dropped_polygons=dropped,
    )


def _feather_alpha(mask: np.ndarray, radius: int) -> np.ndarray:
    """Box-filtered mask for soft blending near the mask boundary."""
    alpha = mask.astype(np.float64)
    size = 2 * radius + 1
    kernel = np.ones(size) / size
    for axis in (0, 1):
        alpha = np.apply_along_axis(
            lambda m: np.convolve(np.pad(m, radius, mode="edge"), kernel, mode="valid"),
            axis,
            alpha,
        )
    # keep the deep interior/exterior exact
    alpha[mask & (alpha > 1.0 - 1e-9)] = 1.0
    alpha[~mask & (alpha < 1e-9)] = 0.0
    return alpha


def composite_road_surface(
    original: np.ndarray,
    synthesized: np.ndarray,
    label: LabelMap,
    cfg: SceneClassConfig,
    feather_radius: int = 0,
) -> np.ndarray:
    """Take road-surface pixels from the synthesized image, rest from the
    original.  Exact per-pixel select unless feather_radius > 0."""
    original = np.asarray(original)
    synthesized = np.asarray(synthesized)
    if original.shape != synthesized.shape:
        raise ValueError("original and synthesized image shapes differ")
    if original.shape[:2] != (label.height, label.width):
        raise ValueError("image and label dimensions differ")
    surface_ids = np.fromiter(sorted(cfg.marking_ids | {cfg.road_id}), dtype=np.uint8)
    mask = np.isin(label.classes, surface_ids)
    if feather_radius <= 0:
        return np.where(mask[..., None], synthesized, original)
    alpha = _feather_alpha(mask, feather_radius)[..., None]
    blended = alpha * synthesized.astype(np.float64) + (1.0 - alpha) * original.astype(np.float64)
    return np.clip(np.rint(blended), 0, 255).astype(np.uint8)


# --- file formats -------------------------------------------------------------


def read_label_png(path) -> LabelMap:
    with Image.open(path) as img:
        if img.mode != "L":
            img = img.convert("L")
        return LabelMap(np.asarray(img, dtype=np.uint8))


def write_label_png(label: LabelMap, path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(label.classes, mode="L").save(path, format="PNG")


def read_rgb_png(path) -> np.ndarray:
    with Image.open(path) as img:
        if img.mode != "RGB":
            img = img.convert("RGB")
        return np.asarray(img, dtype=np.uint8)


def write_rgb_png(image: np.ndarray, path) -> None:
    arr = np.asarray(image, dtype=np.uint8)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError("RGB image must have shape (H, W, 3)")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(arr, mode="RGB").save(path, format="PNG")


def render_preview(
    label: LabelMap, palette: Palette, cfg: SceneClassConfig | None = None
) -> np.ndarray:
    """Colour rendering of a label for eyeballing placements.

    Marking classes use their palette colours; the road is asphalt grey,
    ignore pixels near-black, any other scene id a grey ramp.
    """
    lut = np.zeros((256, 3), dtype=np.uint8)
    for sid in range(256):
        lut[sid] = (40 + (sid * 7) % 120,) * 3
    for entry in palette:
        lut[entry.marking_class.id] = entry.color
    if cfg is not None:
        lut[cfg.road_id] = (70, 70, 70)
        lut[cfg.ignore_id] = (10, 10, 10)
    return lut[label.classes]
