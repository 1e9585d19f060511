"""Parametric polygon generators for the built-in marking classes.

Every generator is deterministic: identical parameters yield
bit-identical vertex lists.  Dimensions default to plausible UK-style
values but are plain configuration; tests assert geometry given
parameters, never real-world fidelity.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import font, shapes


@dataclass(frozen=True)
class ParamSpec:
    """One named template parameter with its documented range."""

    name: str
    default: object
    kind: str = "float"  # float | int | bool | choice
    lo: float | None = None
    hi: float | None = None
    choices: tuple[str, ...] = ()
    doc: str = ""

    def validate(self, value):
        if self.kind == "float":
            v = float(value)
            if not math.isfinite(v):
                raise ValueError(f"{self.name} must be finite")
            if (self.lo is not None and v < self.lo) or (self.hi is not None and v > self.hi):
                raise ValueError(
                    f"{self.name}={v} outside documented range [{self.lo}, {self.hi}]"
                )
            return v
        if self.kind == "int":
            v = int(value)
            if v != value:
                raise ValueError(f"{self.name} must be an integer, got {value!r}")
            if (self.lo is not None and v < self.lo) or (self.hi is not None and v > self.hi):
                raise ValueError(
                    f"{self.name}={v} outside documented range [{self.lo}, {self.hi}]"
                )
            return v
        if self.kind == "bool":
            if not isinstance(value, (bool, np.bool_)):
                raise ValueError(f"{self.name} must be a boolean, got {value!r}")
            return bool(value)
        if self.kind == "choice":
            if value not in self.choices:
                raise ValueError(f"{self.name} must be one of {self.choices}, got {value!r}")
            return value
        raise AssertionError(f"unknown parameter kind {self.kind}")


@dataclass(frozen=True)
class MarkingTemplate:
    """A marking shape family: parameter schema plus polygon generator."""

    name: str
    params: tuple[ParamSpec, ...]
    generator: Callable[[dict], list[np.ndarray]]
    # Documented local-frame bounding box for default parameters,
    # after centering: (lat_min, lat_max, fwd_min, fwd_max).
    bbox: tuple[float, float, float, float]
    doc: str = ""
    _by_name: dict = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "_by_name", {p.name: p for p in self.params})

    def defaults(self) -> dict:
        return {p.name: p.default for p in self.params}

    def resolve(self, overrides: dict | None) -> dict:
        resolved = self.defaults()
        for name, value in (overrides or {}).items():
            spec = self._by_name.get(name)
            if spec is None:
                raise ValueError(f"template {self.name!r} has no parameter {name!r}")
            resolved[name] = spec.validate(value)
        return resolved

    def generate(self, overrides: dict | None = None) -> list[np.ndarray]:
        return self.generator(self.resolve(overrides))


def _fspec(name, default, lo, hi, doc=""):
    return ParamSpec(name, default, "float", lo, hi, doc=doc)


def _ispec(name, default, lo, hi, doc=""):
    return ParamSpec(name, default, "int", lo, hi, doc=doc)


# --- helpers ----------------------------------------------------------------


def _hollow_triangle(verts: np.ndarray, stroke: float) -> list[np.ndarray]:
    """Band between a triangle and its inward-parallel triangle."""
    a = np.linalg.norm(verts[1] - verts[2])
    b = np.linalg.norm(verts[2] - verts[0])
    c = np.linalg.norm(verts[0] - verts[1])
    perimeter = a + b + c
    area = abs(shapes.polygon_area(verts))
    inradius = 2.0 * area / perimeter
    if stroke >= inradius:
        raise ValueError(
            f"stroke_width {stroke} too large for triangle inradius {inradius:.3f}"
        )
    incenter = (a * verts[0] + b * verts[1] + c * verts[2]) / perimeter
    inner = incenter + (verts - incenter) * ((inradius - stroke) / inradius)
    polys = []
    for i in range(3):
        j = (i + 1) % 3
        polys.append(shapes.ensure_ccw(np.array([verts[i], verts[j], inner[j], inner[i]])))
    return polys


def _frame(width: float, length: float, stroke: float) -> list[np.ndarray]:
    """Rectangular border as four overlapping strokes."""
    hw, hl, s = width / 2.0, length / 2.0, stroke
    return [
        shapes.rect(-hw + s / 2, 0.0, s, length),
        shapes.rect(hw - s / 2, 0.0, s, length),
        shapes.rect(0.0, -hl + s / 2, width, s),
        shapes.rect(0.0, hl - s / 2, width, s),
    ]


def _diagonal_stripes(
    width: float, length: float, stroke: float, pitch: float, directions: tuple[int, ...]
) -> list[np.ndarray]:
    """45-degree hatching clipped to a centered width x length box."""
    polys: list[np.ndarray] = []
    reach = (width + length) / 2.0 + stroke
    span = width + length  # long enough to cross the whole box
    k_max = int(math.floor(reach / pitch))
    for sign in directions:
        d = np.array([1.0, float(sign)]) / math.sqrt(2.0)
        n = np.array([-float(sign), 1.0]) / math.sqrt(2.0)
        for k in range(-k_max, k_max + 1):
            # pitch is measured perpendicular to the stripes
            center = n * (k * pitch)
            quad = np.array(
                [
                    center - d * span - n * stroke / 2.0,
                    center + d * span - n * stroke / 2.0,
                    center + d * span + n * stroke / 2.0,
                    center - d * span + n * stroke / 2.0,
                ]
            )
            clipped = shapes.clip_to_rect(
                quad, -width / 2.0, width / 2.0, -length / 2.0, length / 2.0
            )
            if clipped is not None:
                polys.append(clipped)
    return polys


# --- generators --------------------------------------------------------------


def _gen_zigzag(p: dict) -> list[np.ndarray]:
    n_pts = 2 * p["periods"] + 1
    fwd = np.arange(n_pts) * p["half_period"]
    lat = np.where(np.arange(n_pts) % 2 == 0, p["amplitude"], -p["amplitude"])
    centerline = np.column_stack([lat, fwd])
    if p["configuration"] == "dual":
        offsets = (-p["run_spacing"] / 2.0, p["run_spacing"] / 2.0)
    else:
        offsets = (-p["run_spacing"], 0.0, p["run_spacing"])
    return [
        shapes.stroke_polyline(centerline + np.array([off, 0.0]), p["stroke_width"])
        for off in offsets
    ]


def _gen_diagonal_stripes(p: dict) -> list[np.ndarray]:
    w, l, bw = p["area_width"], p["area_length"], p["border_width"]
    inner_w, inner_l = w - 2 * bw, l - 2 * bw
    polys = _frame(w, l, bw) if p["with_border"] else []
    polys += _diagonal_stripes(inner_w, inner_l, p["stripe_width"], p["stripe_pitch"], (1,))
    return polys


def _gen_bus_stop(p: dict) -> list[np.ndarray]:
    dy = (p["letter_height"] + p["row_gap"]) / 2.0
    polys = []
    for word, offset in (("BUS", -dy), ("STOP", dy)):
        for poly in font.word_polygons(
            word, p["letter_width"], p["letter_height"], p["stroke_width"], p["letter_gap"]
        ):
            polys.append(poly + np.array([0.0, offset]))
    return polys


def _equilateral(side: float) -> np.ndarray:
    h = side * math.sqrt(3.0) / 2.0
    return np.array([[-side / 2.0, -h / 3.0], [side / 2.0, -h / 3.0], [0.0, 2.0 * h / 3.0]])


def _gen_warning_triangle(p: dict) -> list[np.ndarray]:
    verts = _equilateral(p["side"])
    if p["filled"]:
        return [verts]
    return _hollow_triangle(verts, p["stroke_width"])


def _gen_give_way_triangle(p: dict) -> list[np.ndarray]:
    b, h = p["base"], p["height"]
    # Apex toward the approaching driver (negative forward).
    verts = shapes.ensure_ccw(
        np.array([[-b / 2.0, h / 3.0], [b / 2.0, h / 3.0], [0.0, -2.0 * h / 3.0]])
    )
    if p["filled"]:
        return [verts]
    return _hollow_triangle(verts, p["stroke_width"])


def _gen_lane_separator(p: dict) -> list[np.ndarray]:
    step = p["dash_length"] + p["gap_length"]
    return [
        shapes.rect(0.0, k * step, p["stroke_width"], p["dash_length"])
        for k in range(p["dash_count"])
    ]


def _gen_double_boundary(p: dict) -> list[np.ndarray]:
    off = (p["separation"] + p["stroke_width"]) / 2.0
    return [
        shapes.rect(-off, 0.0, p["stroke_width"], p["length"]),
        shapes.rect(off, 0.0, p["stroke_width"], p["length"]),
    ]


def _gen_parking_separator(p: dict) -> list[np.ndarray]:
    polys = [shapes.rect(0.0, 0.0, p["stroke_width"], p["length"])]
    if p["with_end_bar"]:
        polys.append(
            shapes.rect(0.0, p["length"] / 2.0 - p["stroke_width"] / 2.0, p["end_bar_length"], p["stroke_width"])
        )
    return polys


def _gen_stop_line(p: dict) -> list[np.ndarray]:
    return [shapes.rect(0.0, 0.0, p["line_length"], p["stroke_width"])]


def _gen_give_way_dashes(p: dict) -> list[np.ndarray]:
    step = p["dash_length"] + p["gap_length"]
    total = p["dash_count"] * p["dash_length"] + (p["dash_count"] - 1) * p["gap_length"]
    start = -total / 2.0 + p["dash_length"] / 2.0
    row_off = (p["row_separation"] + p["stroke_width"]) / 2.0
    polys = []
    for row in (-row_off, row_off):
        for k in range(p["dash_count"]):
            polys.append(shapes.rect(start + k * step, row, p["dash_length"], p["stroke_width"]))
    return polys


def _gen_zebra_stripe(p: dict) -> list[np.ndarray]:
    step = p["stripe_width"] + p["stripe_gap"]
    total = p["stripe_count"] * p["stripe_width"] + (p["stripe_count"] - 1) * p["stripe_gap"]
    start = -total / 2.0 + p["stripe_width"] / 2.0
    return [
        shapes.rect(start + k * step, 0.0, p["stripe_width"], p["stripe_length"])
        for k in range(p["stripe_count"])
    ]


def _gen_crossing_dots(p: dict) -> list[np.ndarray]:
    total = (p["dot_count"] - 1) * p["pitch"]
    start = -total / 2.0
    return [
        shapes.rect(start + k * p["pitch"], 0.0, p["dot_size"], p["dot_size"])
        for k in range(p["dot_count"])
    ]


def _straight_arrow_polygon(length, shaft_width, head_width, head_length) -> np.ndarray:
    if head_width <= shaft_width:
        raise ValueError("head_width must exceed shaft_width")
    if head_length >= length:
        raise ValueError("head_length must be smaller than length")
    sw, hw = shaft_width / 2.0, head_width / 2.0
    neck = length - head_length
    return shapes.ensure_ccw(
        np.array(
            [
                [-sw, 0.0],
                [sw, 0.0],
                [sw, neck],
                [hw, neck],
                [0.0, length],
                [-hw, neck],
                [-sw, neck],
            ]
        )
    )


def _gen_arrow_straight(p: dict) -> list[np.ndarray]:
    return [
        _straight_arrow_polygon(
            p["length"], p["shaft_width"], p["head_width"], p["head_length"]
        )
    ]


def _turn_arrow_polys(p: dict, mirror: bool) -> list[np.ndarray]:
    l, sw = p["length"], p["shaft_width"]
    bl, hw, hl = p["branch_length"], p["head_width"], p["head_length"]
    shaft = shapes.rect(0.0, l / 2.0, sw, l)
    branch = shapes.rect(-(bl / 2.0), l - sw / 2.0, bl + sw, sw)
    tip_fwd = l - sw / 2.0
    head = shapes.ensure_ccw(
        np.array(
            [
                [-bl - sw / 2.0, tip_fwd - hw / 2.0],
                [-bl - sw / 2.0, tip_fwd + hw / 2.0],
                [-bl - sw / 2.0 - hl, tip_fwd],
            ]
        )
    )
    polys = [shaft, branch, head]
    if mirror:
        polys = [shapes.ensure_ccw(poly * np.array([-1.0, 1.0])) for poly in polys]
    return polys


def _gen_arrow_left(p: dict) -> list[np.ndarray]:
    return _turn_arrow_polys(p, mirror=False)


def _gen_arrow_right(p: dict) -> list[np.ndarray]:
    return _turn_arrow_polys(p, mirror=True)


def _gen_arrow_straight_left(p: dict) -> list[np.ndarray]:
    polys = [
        _straight_arrow_polygon(
            p["length"], p["shaft_width"], p["head_width"], p["head_length"]
        )
    ]
    sw, bl = p["shaft_width"], p["branch_length"]
    hw, hl = 0.75 * p["head_width"], 0.75 * p["head_length"]
    mid = 0.55 * p["length"]
    polys.append(shapes.rect(-(bl / 2.0), mid, bl + sw, sw))
    polys.append(
        shapes.ensure_ccw(
            np.array(
                [
                    [-bl - sw / 2.0, mid - hw / 2.0],
                    [-bl - sw / 2.0, mid + hw / 2.0],
                    [-bl - sw / 2.0 - hl, mid],
                ]
            )
        )
    )
    return polys


def _gen_box_junction(p: dict) -> list[np.ndarray]:
    w, l, bw = p["box_width"], p["box_length"], p["border_width"]
    polys = _frame(w, l, bw)
    polys += _diagonal_stripes(
        w - 2 * bw, l - 2 * bw, p["stroke_width"], p["stripe_pitch"], (1, -1)
    )
    return polys


def _gen_chevron(p: dict) -> list[np.ndarray]:
    span, depth, sw = p["span"], p["depth"], p["stroke_width"]
    polys = []
    for k in range(p["count"]):
        f0 = k * p["spacing"]
        polys.append(
            shapes.ensure_ccw(
                np.array(
                    [
                        [-span / 2.0, f0],
                        [0.0, f0 + depth],
                        [span / 2.0, f0],
                        [span / 2.0, f0 + sw],
                        [0.0, f0 + depth + sw],
                        [-span / 2.0, f0 + sw],
                    ]
                )
            )
        )
    return polys


def _gen_cycle_symbol(p: dict) -> list[np.ndarray]:
    r, sep, sw = p["wheel_radius"], p["wheel_separation"], p["stroke_width"]
    polys: list[np.ndarray] = []
    for cx in (-sep / 2.0, sep / 2.0):
        wheel = shapes.regular_polygon(cx, 0.0, r, 16)
        polys.extend(shapes.ring_band(wheel, sw))
    top = 2.1 * r
    frame_strokes = [
        [(-sep / 2.0, 0.0), (-0.1 * sep, top)],          # seat tube
        [(-0.1 * sep, top), (0.3 * sep, 0.93 * top)],    # top tube
        [(0.3 * sep, 0.93 * top), (sep / 2.0, 0.0)],     # fork
        [(-0.28 * sep, 1.05 * top), (0.02 * sep, 1.05 * top)],  # seat
        [(0.22 * sep, 1.1 * top), (0.45 * sep, 0.98 * top)],    # handlebar
    ]
    for stroke in frame_strokes:
        polys.extend(shapes.stroke_segments(np.array(stroke), sw))
    return polys


def _gen_text_slow(p: dict) -> list[np.ndarray]:
    return font.word_polygons(
        "SLOW", p["letter_width"], p["letter_height"], p["stroke_width"], p["letter_gap"]
    )


_STROKE = _fspec("stroke_width", 0.1, 0.02, 0.5, "painted stroke width, meters")

TEMPLATES: dict[str, MarkingTemplate] = {}


def _register(template: MarkingTemplate) -> None:
    TEMPLATES[template.name] = template


_register(
    MarkingTemplate(
        "zigzag",
        (
            _STROKE,
            _fspec("amplitude", 0.45, 0.05, 2.0, "half peak-to-peak sweep, meters"),
            _fspec("half_period", 2.0, 0.5, 6.0, "forward distance between sweeps, meters"),
            _ispec("periods", 6, 1, 12, "full zig-zag periods per run"),
            ParamSpec(
                "configuration",
                "dual",
                "choice",
                choices=("dual", "triple"),
                doc="number of parallel runs: dual=2, triple=3",
            ),
            _fspec("run_spacing", 3.0, 0.5, 8.0, "lateral spacing between runs, meters"),
        ),
        _gen_zigzag,
        bbox=(-4.6, 4.6, -13.0, 13.0),
        doc="controlled-zone zigzag runs along the lane edges",
    )
)
_register(
    MarkingTemplate(
        "diagonal_stripes",
        (
            _fspec("area_width", 3.0, 1.0, 10.0, "hatched box width, meters"),
            _fspec("area_length", 4.0, 1.0, 12.0, "hatched box length, meters"),
            _fspec("stripe_width", 0.3, 0.05, 1.0, "painted stripe width, meters"),
            _fspec("stripe_pitch", 1.0, 0.3, 3.0, "spacing between stripe centerlines, meters"),
            _fspec("border_width", 0.15, 0.05, 0.5, "border stroke width, meters"),
            ParamSpec("with_border", True, "bool", doc="draw the bounding border"),
        ),
        _gen_diagonal_stripes,
        bbox=(-1.6, 1.6, -2.1, 2.1),
        doc="must-not-enter hatched area with 45-degree stripes",
    )
)
_register(
    MarkingTemplate(
        "bus_stop",
        (
            _fspec("letter_height", 2.0, 0.5, 6.0, "glyph height, meters"),
            _fspec("letter_width", 0.7, 0.2, 2.0, "glyph width, meters"),
            ParamSpec("stroke_width", 0.15, "float", 0.03, 0.5, doc="glyph stroke width, meters"),
            _fspec("letter_gap", 0.25, 0.05, 1.0, "gap between glyphs, meters"),
            _fspec("row_gap", 0.8, 0.1, 3.0, "gap between the BUS and STOP rows, meters"),
        ),
        _gen_bus_stop,
        bbox=(-2.1, 2.1, -2.7, 2.7),
        doc="BUS STOP lettering in the built-in stroke font",
    )
)
_register(
    MarkingTemplate(
        "warning_triangle",
        (
            _fspec("side", 0.6, 0.2, 5.0, "equilateral side length, meters"),
            ParamSpec("stroke_width", 0.1, "float", 0.02, 0.5, doc="outline stroke width, meters"),
            ParamSpec("filled", False, "bool", doc="fill the triangle instead of outlining"),
        ),
        _gen_warning_triangle,
        bbox=(-0.35, 0.35, -0.2, 0.4),
        doc="small warning triangle, apex pointing forward",
    )
)
_register(
    MarkingTemplate(
        "lane_separator",
        (
            _fspec("dash_length", 2.0, 0.5, 6.0, "dash length, meters"),
            _fspec("gap_length", 4.0, 0.5, 12.0, "gap between dashes, meters"),
            ParamSpec("stroke_width", 0.1, "float", 0.05, 0.4, doc="line width, meters"),
            _ispec("dash_count", 3, 1, 10, "number of dashes"),
        ),
        _gen_lane_separator,
        bbox=(-0.1, 0.1, -7.1, 7.1),
        doc="broken lane separator line",
    )
)
_register(
    MarkingTemplate(
        "double_boundary",
        (
            _fspec("length", 4.0, 1.0, 20.0, "line length, meters"),
            ParamSpec("stroke_width", 0.1, "float", 0.05, 0.4, doc="line width, meters"),
            _fspec("separation", 0.15, 0.05, 0.5, "clear gap between the two lines, meters"),
        ),
        _gen_double_boundary,
        bbox=(-0.25, 0.25, -2.1, 2.1),
        doc="double solid boundary line",
    )
)
_register(
    MarkingTemplate(
        "parking_separator",
        (
            _fspec("length", 1.5, 0.5, 5.0, "stroke length, meters"),
            ParamSpec("stroke_width", 0.1, "float", 0.05, 0.4, doc="stroke width, meters"),
            _fspec("end_bar_length", 0.6, 0.2, 2.0, "lateral end-bar length, meters"),
            ParamSpec("with_end_bar", True, "bool", doc="draw the end bar (T shape)"),
        ),
        _gen_parking_separator,
        bbox=(-0.35, 0.35, -1.1, 0.7),
        doc="parking bay separator stroke",
    )
)
_register(
    MarkingTemplate(
        "stop_line",
        (
            _fspec("line_length", 3.0, 1.0, 12.0, "lateral extent, meters"),
            ParamSpec("stroke_width", 0.3, "float", 0.1, 1.0, doc="forward extent, meters"),
        ),
        _gen_stop_line,
        bbox=(-1.6, 1.6, -0.2, 0.2),
        doc="solid transverse stop line",
    )
)
_register(
    MarkingTemplate(
        "give_way_dashes",
        (
            _fspec("dash_length", 0.6, 0.2, 2.0, "lateral dash length, meters"),
            _fspec("gap_length", 0.3, 0.1, 1.0, "gap between dashes, meters"),
            _ispec("dash_count", 4, 1, 12, "dashes per row"),
            ParamSpec("stroke_width", 0.2, "float", 0.05, 0.6, doc="forward dash extent, meters"),
            _fspec("row_separation", 0.3, 0.1, 1.0, "clear gap between the two rows, meters"),
        ),
        _gen_give_way_dashes,
        bbox=(-1.8, 1.8, -0.5, 0.5),
        doc="double broken give-way line",
    )
)
_register(
    MarkingTemplate(
        "give_way_triangle",
        (
            _fspec("base", 1.2, 0.4, 4.0, "triangle base, meters"),
            _fspec("height", 1.8, 0.5, 5.0, "triangle height, meters"),
            ParamSpec("stroke_width", 0.15, "float", 0.03, 0.5, doc="outline stroke width, meters"),
            ParamSpec("filled", False, "bool", doc="fill instead of outlining"),
        ),
        _gen_give_way_triangle,
        bbox=(-0.7, 0.7, -1.3, 0.7),
        doc="hollow give-way triangle, apex toward the driver",
    )
)
_register(
    MarkingTemplate(
        "zebra_stripe",
        (
            _ispec("stripe_count", 5, 2, 12, "number of painted stripes"),
            _fspec("stripe_width", 0.5, 0.2, 1.5, "lateral stripe width, meters"),
            _fspec("stripe_length", 2.5, 1.0, 6.0, "forward stripe extent, meters"),
            _fspec("stripe_gap", 0.5, 0.2, 1.5, "gap between stripes, meters"),
        ),
        _gen_zebra_stripe,
        bbox=(-2.6, 2.6, -1.3, 1.3),
        doc="zebra crossing stripes",
    )
)
_register(
    MarkingTemplate(
        "crossing_dots",
        (
            _fspec("dot_size", 0.25, 0.1, 0.6, "square dot side, meters"),
            _ispec("dot_count", 6, 2, 20, "number of dots"),
            _fspec("pitch", 0.6, 0.2, 2.0, "dot center spacing, meters"),
        ),
        _gen_crossing_dots,
        bbox=(-1.7, 1.7, -0.15, 0.15),
        doc="dotted crossing-limit row",
    )
)
_register(
    MarkingTemplate(
        "arrow_straight",
        (
            _fspec("length", 4.0, 1.0, 8.0, "total arrow length, meters"),
            _fspec("shaft_width", 0.35, 0.1, 1.0, "shaft width, meters"),
            _fspec("head_width", 1.0, 0.3, 2.5, "head width, meters"),
            _fspec("head_length", 1.2, 0.3, 3.0, "head length, meters"),
        ),
        _gen_arrow_straight,
        bbox=(-0.55, 0.55, -2.1, 2.1),
        doc="straight-ahead arrow",
    )
)
_TURN_ARROW_PARAMS = (
    _fspec("length", 4.0, 1.0, 8.0, "shaft length, meters"),
    _fspec("shaft_width", 0.35, 0.1, 1.0, "stroke width, meters"),
    _fspec("branch_length", 1.0, 0.3, 2.5, "lateral branch length, meters"),
    _fspec("head_width", 0.9, 0.3, 2.0, "head width, meters"),
    _fspec("head_length", 0.9, 0.3, 2.5, "head length, meters"),
)
_register(
    MarkingTemplate(
        "arrow_left",
        _TURN_ARROW_PARAMS,
        _gen_arrow_left,
        bbox=(-1.9, 0.7, -2.9, 1.8),
        doc="left-turn arrow",
    )
)
_register(
    MarkingTemplate(
        "arrow_right",
        _TURN_ARROW_PARAMS,
        _gen_arrow_right,
        bbox=(-0.7, 1.9, -2.9, 1.8),
        doc="right-turn arrow",
    )
)
_register(
    MarkingTemplate(
        "arrow_straight_left",
        (
            _fspec("length", 4.0, 1.0, 8.0, "total arrow length, meters"),
            _fspec("shaft_width", 0.35, 0.1, 1.0, "shaft width, meters"),
            _fspec("head_width", 1.0, 0.3, 2.5, "head width, meters"),
            _fspec("head_length", 1.2, 0.3, 3.0, "head length, meters"),
            _fspec("branch_length", 0.9, 0.3, 2.5, "lateral branch length, meters"),
        ),
        _gen_arrow_straight_left,
        bbox=(-1.9, 0.9, -2.3, 2.1),
        doc="combined straight/left arrow",
    )
)
_register(
    MarkingTemplate(
        "box_junction",
        (
            _fspec("box_width", 4.0, 2.0, 12.0, "box width, meters"),
            _fspec("box_length", 4.0, 2.0, 12.0, "box length, meters"),
            ParamSpec("stroke_width", 0.2, "float", 0.05, 0.6, doc="hatch stroke width, meters"),
            _fspec("stripe_pitch", 1.0, 0.4, 3.0, "hatch spacing, meters"),
            _fspec("border_width", 0.2, 0.05, 0.6, "border stroke width, meters"),
        ),
        _gen_box_junction,
        bbox=(-2.1, 2.1, -2.1, 2.1),
        doc="criss-cross box junction",
    )
)
_register(
    MarkingTemplate(
        "chevron",
        (
            _fspec("span", 2.5, 0.5, 6.0, "lateral span, meters"),
            _fspec("depth", 1.0, 0.2, 3.0, "apex rise, meters"),
            ParamSpec("stroke_width", 0.35, "float", 0.1, 1.0, doc="band thickness, meters"),
            _ispec("count", 3, 1, 10, "number of chevrons"),
            _fspec("spacing", 1.2, 0.3, 4.0, "spacing between chevrons, meters"),
        ),
        _gen_chevron,
        bbox=(-1.3, 1.3, -2.1, 2.1),
        doc="repeated chevron band, apex pointing forward",
    )
)
_register(
    MarkingTemplate(
        "cycle_symbol",
        (
            _fspec("wheel_radius", 0.35, 0.1, 1.0, "wheel radius, meters"),
            _fspec("wheel_separation", 1.1, 0.4, 3.0, "hub separation, meters"),
            ParamSpec("stroke_width", 0.08, "float", 0.02, 0.3, doc="stroke width, meters"),
        ),
        _gen_cycle_symbol,
        bbox=(-1.0, 1.0, -0.6, 1.1),
        doc="side-view cycle symbol",
    )
)
_register(
    MarkingTemplate(
        "text_slow",
        (
            _fspec("letter_height", 2.5, 0.5, 6.0, "glyph height, meters"),
            _fspec("letter_width", 0.8, 0.2, 2.0, "glyph width, meters"),
            ParamSpec("stroke_width", 0.18, "float", 0.03, 0.5, doc="glyph stroke width, meters"),
            _fspec("letter_gap", 0.3, 0.05, 1.0, "gap between glyphs, meters"),
        ),
        _gen_text_slow,
        bbox=(-2.4, 2.4, -1.5, 1.5),
        doc="SLOW lettering in the built-in stroke font",
    )
)
