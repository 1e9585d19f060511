"""Road-marking classes, parametric templates, and instantiation.

The default palette carries 20 marking classes (ids 1..20) plus the
background id 0.  Class ids are stable across releases; the palette can
be replaced via a JSON palette file, which keeps template dimensions
plain configuration.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..geometry import GroundPoint
from . import font, shapes, templates
from .shapes import polygon_area, polygon_centroid, polygon_is_simple
from .templates import TEMPLATES, MarkingTemplate, ParamSpec


@dataclass(frozen=True)
class MarkingClass:
    id: int
    name: str


@dataclass(frozen=True)
class PaletteEntry:
    marking_class: MarkingClass
    template: str | None  # None for background
    default_params: dict = field(default_factory=dict)
    color: tuple[int, int, int] = (255, 255, 255)


class Palette:
    """Ordered set of marking classes with their template bindings."""

    def __init__(self, entries: list[PaletteEntry]):
        ids = [e.marking_class.id for e in entries]
        if len(set(ids)) != len(ids):
            raise ValueError("palette class ids must be unique")
        names = [e.marking_class.name for e in entries]
        if len(set(names)) != len(names):
            raise ValueError("palette class names must be unique")
        self.entries = sorted(entries, key=lambda e: e.marking_class.id)
        self._by_id = {e.marking_class.id: e for e in self.entries}
        self._by_name = {e.marking_class.name: e for e in self.entries}

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def classes(self) -> list[MarkingClass]:
        return [e.marking_class for e in self.entries]

    def marking_ids(self) -> frozenset[int]:
        return frozenset(e.marking_class.id for e in self.entries if e.template is not None)

    def get(self, key) -> PaletteEntry:
        if isinstance(key, MarkingClass):
            key = key.id
        entry = self._by_id.get(key) if isinstance(key, int) else self._by_name.get(key)
        if entry is None:
            raise KeyError(f"class {key!r} not in palette")
        return entry

    def to_json(self) -> list[dict]:
        return [
            {
                "id": e.marking_class.id,
                "name": e.marking_class.name,
                "template": e.template,
                "default_params": dict(e.default_params),
                "color": list(e.color),
            }
            for e in self.entries
        ]

    @classmethod
    def from_json(cls, data: list[dict]) -> "Palette":
        entries = []
        for item in data:
            template = item.get("template")
            if template is not None and template not in TEMPLATES:
                raise ValueError(f"unknown template {template!r} for class {item['name']!r}")
            entries.append(
                PaletteEntry(
                    MarkingClass(int(item["id"]), str(item["name"])),
                    template,
                    dict(item.get("default_params", {})),
                    tuple(item.get("color", (255, 255, 255))),
                )
            )
        return cls(entries)


# Display colours for previews; ids are the API, colours are cosmetic.
_BUILTIN = [
    (0, "background", None, (0, 0, 0)),
    (1, "zigzag", "zigzag", (255, 85, 255)),
    (2, "diagonal_stripes", "diagonal_stripes", (255, 170, 0)),
    (3, "bus_stop", "bus_stop", (255, 0, 0)),
    (4, "warning_triangle", "warning_triangle", (0, 255, 255)),
    (5, "lane_separator", "lane_separator", (0, 85, 255)),
    (6, "double_boundary", "double_boundary", (0, 255, 0)),
    (7, "parking_separator", "parking_separator", (255, 255, 0)),
    (8, "stop_line", "stop_line", (220, 20, 60)),
    (9, "give_way_dashes", "give_way_dashes", (255, 140, 105)),
    (10, "give_way_triangle", "give_way_triangle", (176, 48, 96)),
    (11, "zebra_stripe", "zebra_stripe", (240, 240, 240)),
    (12, "crossing_dots", "crossing_dots", (190, 190, 255)),
    (13, "arrow_straight", "arrow_straight", (85, 255, 170)),
    (14, "arrow_left", "arrow_left", (85, 170, 255)),
    (15, "arrow_right", "arrow_right", (170, 85, 255)),
    (16, "arrow_straight_left", "arrow_straight_left", (60, 180, 120)),
    (17, "box_junction", "box_junction", (255, 215, 0)),
    (18, "chevron", "chevron", (255, 105, 180)),
    (19, "cycle_symbol", "cycle_symbol", (124, 252, 0)),
    (20, "text_slow", "text_slow", (255, 250, 205)),
]


def builtin_palette() -> Palette:
    """Default palette: background plus the 20 built-in marking classes."""
    return Palette(
        [
            PaletteEntry(MarkingClass(cid, name), template, color=color)
            for cid, name, template, color in _BUILTIN
        ]
    )


@dataclass(frozen=True)
class MarkingInstance:
    """A marking placed somewhere on the ground plane.

    Polygons are in the template's local metric frame, centered on the
    polygon-set area centroid; pose = (anchor, yaw) carries them into
    ground coordinates.
    """

    marking_class: MarkingClass
    polygons: tuple[np.ndarray, ...]
    anchor: GroundPoint
    yaw: float
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (-math.pi < self.yaw <= math.pi):
            raise ValueError(f"pose yaw must lie in (-pi, pi], got {self.yaw}")


def _validate_polygons(polys: list[np.ndarray], template_name: str) -> list[np.ndarray]:
    if not polys:
        raise ValueError(f"template {template_name!r} generated no polygons")
    checked = []
    for poly in polys:
        v = np.asarray(poly, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise ValueError(f"template {template_name!r} generated a malformed polygon")
        if not np.all(np.isfinite(v)):
            raise ValueError(f"template {template_name!r} generated non-finite vertices")
        v = shapes.ensure_ccw(v)
        if polygon_area(v) <= 0:
            raise ValueError(f"template {template_name!r} generated a zero-area polygon")
        if not polygon_is_simple(v):
            raise ValueError(f"template {template_name!r} generated a self-intersecting polygon")
        checked.append(v)
    return checked


def _recenter(polys: list[np.ndarray]) -> list[np.ndarray]:
    """Shift so the area-weighted centroid of the set sits at (0, 0)."""
    total_area = 0.0
    cx = cy = 0.0
    for poly in polys:
        a = polygon_area(poly)
        px, py = polygon_centroid(poly)
        total_area += a
        cx += a * px
        cy += a * py
    center = np.array([cx / total_area, cy / total_area])
    return [poly - center for poly in polys]


@lru_cache(maxsize=256)
def _cached_polygons(template_name: str, param_items: tuple) -> tuple[np.ndarray, ...]:
    template = TEMPLATES[template_name]
    polys = template.generator(dict(param_items))
    polys = tuple(_recenter(_validate_polygons(polys, template_name)))
    for poly in polys:
        poly.flags.writeable = False
    return polys


def generate_polygons(template_name: str, params: dict | None = None) -> list[np.ndarray]:
    """Validated, centroid-centered polygons for a template.

    Generation is deterministic in (template, params), so results are
    memoized; the returned arrays are shared and read-only.
    """
    try:
        template = TEMPLATES[template_name]
    except KeyError:
        raise ValueError(f"unknown template {template_name!r}") from None
    resolved = template.resolve(params)
    return list(_cached_polygons(template_name, tuple(sorted(resolved.items()))))


def instantiate(
    marking_class,
    params: dict | None = None,
    anchor: GroundPoint = GroundPoint(0.0, 0.0),
    yaw: float = 0.0,
    palette: Palette | None = None,
) -> MarkingInstance:
    """Build a MarkingInstance for a palette class.

    marking_class may be a MarkingClass, a class id, or a class name.
    params override the template defaults and must stay inside each
    parameter's documented range.
    """
    palette = palette or builtin_palette()
    entry = palette.get(marking_class)
    if entry.template is None:
        raise ValueError(f"class {entry.marking_class.name!r} has no template (background)")
    merged = dict(entry.default_params)
    merged.update(params or {})
    polys = generate_polygons(entry.template, merged)
    template = TEMPLATES[entry.template]
    return MarkingInstance(
        marking_class=entry.marking_class,
        polygons=tuple(polys),
        anchor=anchor,
        yaw=float(yaw),
        params=template.resolve(merged),
    )


def transform_to_ground(instance: MarkingInstance) -> list[np.ndarray]:
    """Rotate by pose yaw (right-handed about vertical), then translate."""
    c, s = math.cos(instance.yaw), math.sin(instance.yaw)
    rot = np.array([[c, -s], [s, c]])
    shift = np.array([instance.anchor.lateral, instance.anchor.forward])
    return [poly @ rot.T + shift for poly in instance.polygons]


def describe_templates() -> dict:
    """Parameter documentation for every registered template."""
    out = {}
    for name, template in sorted(TEMPLATES.items()):
        out[name] = {
            "doc": template.doc,
            "bbox": list(template.bbox),
            "params": [
                {
                    "name": p.name,
                    "default": p.default,
                    "kind": p.kind,
                    "range": [p.lo, p.hi] if p.kind in ("float", "int") else None,
                    "choices": list(p.choices) if p.choices else None,
                    "doc": p.doc,
                }
                for p in template.params
            ],
        }
    return out
