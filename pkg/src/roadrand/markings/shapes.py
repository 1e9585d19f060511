"""Planar polygon primitives shared by the marking templates.

Polygons are (N, 2) float arrays of (lateral, forward) vertices,
counter-clockwise, simple, with positive area.
"""

import math

import numpy as np


def polygon_area(vertices: np.ndarray) -> float:
    """Signed shoelace area; positive for counter-clockwise order."""
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def polygon_centroid(vertices: np.ndarray) -> tuple[float, float]:
    """Area centroid of a simple polygon."""
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * float(np.sum(cross))
    if abs(area) < 1e-300:
        raise ValueError("degenerate polygon has no centroid")
    cx = float(np.sum((x + xn) * cross)) / (6.0 * area)
    cy = float(np.sum((y + yn) * cross)) / (6.0 * area)
    return cx, cy


def ensure_ccw(vertices: np.ndarray) -> np.ndarray:
    v = np.asarray(vertices, dtype=float)
    if polygon_area(v) < 0:
        return v[::-1].copy()
    return v


def _segments_properly_intersect(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


def polygon_is_simple(vertices: np.ndarray) -> bool:
    """True when no two non-adjacent edges properly intersect.

    O(n^2); template polygons are small, so this stays cheap.
    """
    v = np.asarray(vertices, dtype=float)
    n = len(v)
    if n < 3:
        return False
    for i in range(n):
        p1, p2 = v[i], v[(i + 1) % n]
        if np.allclose(p1, p2):
            return False
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            q1, q2 = v[j], v[(j + 1) % n]
            if _segments_properly_intersect(p1, p2, q1, q2):
                return False
    return True


def rect(center_lat: float, center_fwd: float, width: float, length: float) -> np.ndarray:
    """Axis-aligned rectangle: width along lateral, length along forward."""
    hw, hl = width / 2.0, length / 2.0
    return np.array(
        [
            [center_lat - hw, center_fwd - hl],
            [center_lat + hw, center_fwd - hl],
            [center_lat + hw, center_fwd + hl],
            [center_lat - hw, center_fwd + hl],
        ]
    )


def regular_polygon(center_lat: float, center_fwd: float, radius: float, sides: int) -> np.ndarray:
    ang = 2.0 * math.pi * np.arange(sides) / sides
    return np.column_stack(
        [center_lat + radius * np.cos(ang), center_fwd + radius * np.sin(ang)]
    )


def _offset_points(points: np.ndarray, distance: float, closed: bool) -> np.ndarray:
    """Miter-offset a polyline to one side (positive = left of travel)."""
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if closed:
        seg = np.roll(pts, -1, axis=0) - pts
    else:
        seg = pts[1:] - pts[:-1]
    lengths = np.hypot(seg[:, 0], seg[:, 1])
    if np.any(lengths < 1e-12):
        raise ValueError("polyline contains a zero-length segment")
    # Left normal of each segment.
    normals = np.column_stack([-seg[:, 1], seg[:, 0]]) / lengths[:, None]

    out = np.empty_like(pts)
    for i in range(n):
        if closed:
            n_prev = normals[(i - 1) % n]
            n_next = normals[i % n]
        else:
            n_prev = normals[max(i - 1, 0)]
            n_next = normals[min(i, n - 2)]
        m = n_prev + n_next
        norm = math.hypot(m[0], m[1])
        if norm < 1e-12:
            raise ValueError("polyline reverses direction; cannot miter")
        m = m / norm
        scale = distance / float(m @ n_next)
        out[i] = pts[i] + m * scale
    return out


def stroke_polyline(points: np.ndarray, width: float) -> np.ndarray:
    """Thicken an open polyline into a single miter-joined polygon.

    Suitable for gentle turns; the caller's validity check rejects
    widths large enough to self-intersect.
    """
    if width <= 0:
        raise ValueError("stroke width must be positive")
    left = _offset_points(points, width / 2.0, closed=False)
    right = _offset_points(points, -width / 2.0, closed=False)
    return ensure_ccw(np.vstack([left, right[::-1]]))


def stroke_segments(points: np.ndarray, width: float, joint_sides: int = 8) -> list[np.ndarray]:
    """Thicken a polyline as one quad per segment plus small joint disks.

    Always yields simple polygons, so it is safe for sharp glyph
    strokes where miter joins would self-intersect.
    """
    if width <= 0:
        raise ValueError("stroke width must be positive")
    pts = np.asarray(points, dtype=float)
    polys: list[np.ndarray] = []
    for a, b in zip(pts[:-1], pts[1:]):
        d = b - a
        length = math.hypot(d[0], d[1])
        if length < 1e-12:
            raise ValueError("polyline contains a zero-length segment")
        nx, ny = -d[1] / length * width / 2.0, d[0] / length * width / 2.0
        quad = np.array(
            [
                [a[0] + nx, a[1] + ny],
                [a[0] - nx, a[1] - ny],
                [b[0] - nx, b[1] - ny],
                [b[0] + nx, b[1] + ny],
            ]
        )
        polys.append(ensure_ccw(quad))
    for p in pts[1:-1]:
        polys.append(regular_polygon(p[0], p[1], width / 2.0, joint_sides))
    return polys


def ring_band(points: np.ndarray, width: float) -> list[np.ndarray]:
    """Annular band around a closed polyline, one quad per segment."""
    if width <= 0:
        raise ValueError("stroke width must be positive")
    pts = np.asarray(points, dtype=float)
    outer = _offset_points(pts, -width / 2.0, closed=True)
    inner = _offset_points(pts, width / 2.0, closed=True)
    n = len(pts)
    polys = []
    for i in range(n):
        j = (i + 1) % n
        quad = np.array([outer[i], outer[j], inner[j], inner[i]])
        polys.append(ensure_ccw(quad))
    return polys


def clip_halfplane(vertices: np.ndarray, a: float, b: float, c: float) -> np.ndarray | None:
    """Keep the part of a polygons with a*lat + b*fwd + c >= 0.

    Sutherland-Hodgman step; returns None when the clipped region is
    empty or degenerate.
    """
    v = np.asarray(vertices, dtype=float)
    out: list[np.ndarray] = []
    n = len(v)
    d = v[:, 0] * a + v[:, 1] * b + c
    for i in range(n):
        j = (i + 1) % n
        inside_i, inside_j = d[i] >= 0, d[j] >= 0
        if inside_i:
            out.append(v[i])
        if inside_i != inside_j:
            t = d[i] / (d[i] - d[j])
            out.append(v[i] + t * (v[j] - v[i]))
    if len(out) < 3:
        return None
    clipped = np.array(out)
    if abs(polygon_area(clipped)) < 1e-12:
        return None
    return clipped


def clip_to_rect(
    vertices: np.ndarray,
    lat_min: float,
    lat_max: float,
    fwd_min: float,
    fwd_max: float,
) -> np.ndarray | None:
    """Clip a convex polygon to an axis-aligned rectangle."""
    poly = np.asarray(vertices, dtype=float)
    for a, b, c in (
        (1.0, 0.0, -lat_min),
        (-1.0, 0.0, lat_max),
        (0.0, 1.0, -fwd_min),
        (0.0, -1.0, fwd_max),
    ):
        clipped = clip_halfplane(poly, a, b, c)
        if clipped is None:
            return None
        poly = clipped
    return ensure_ccw(poly)
