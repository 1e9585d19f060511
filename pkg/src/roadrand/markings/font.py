"""Minimal built-in stroke font for lettered markings.

Glyphs are polyline strokes on a 4 x 6 design grid, rendered as
per-segment quads so sharp corners never self-intersect.  Curved
letterforms are approximated with straight segments; road lettering is
heavily elongated anyway, so the approximation reads fine in labels.
"""

import numpy as np

from . import shapes

GRID_WIDTH = 4.0
GRID_HEIGHT = 6.0

# name -> list of (points, closed) strokes on the design grid.
_GLYPHS: dict[str, list[tuple[list[tuple[float, float]], bool]]] = {
    "B": [
        ([(0, 0), (0, 6)], False),
        ([(0, 6), (3, 6), (4, 5), (4, 4), (3, 3), (0, 3)], False),
        ([(0, 3), (3, 3), (4, 2), (4, 1), (3, 0), (0, 0)], False),
    ],
    "L": [
        ([(0, 6), (0, 0), (4, 0)], False),
    ],
    "O": [
        ([(1, 0), (3, 0), (4, 1), (4, 5), (3, 6), (1, 6), (0, 5), (0, 1)], True),
    ],
    "P": [
        ([(0, 0), (0, 6)], False),
        ([(0, 6), (3, 6), (4, 5), (4, 4), (3, 3), (0, 3)], False),
    ],
    "S": [
        (
            [
                (4, 5),
                (3, 6),
                (1, 6),
                (0, 5),
                (0, 4),
                (1, 3),
                (3, 3),
                (4, 2),
                (4, 1),
                (3, 0),
                (1, 0),
                (0, 1),
            ],
            False,
        ),
    ],
    "T": [
        ([(0, 6), (4, 6)], False),
        ([(2, 6), (2, 0)], False),
    ],
    "U": [
        ([(0, 6), (0, 1), (1, 0), (3, 0), (4, 1), (4, 6)], False),
    ],
    "W": [
        ([(0, 6), (1, 0), (2, 3), (3, 0), (4, 6)], False),
    ],
}


def available_glyphs() -> list[str]:
    return sorted(_GLYPHS)


def glyph_polygons(
    letter: str, width: float, height: float, stroke_width: float
) -> list[np.ndarray]:
    """Polygons for one glyph scaled to width x height meters.

    The glyph's design-grid origin maps to (0, 0); x spans lateral,
    y spans forward (letters are read facing the oncoming driver).
    """
    try:
        strokes = _GLYPHS[letter.upper()]
    except KeyError:
        raise ValueError(f"glyph {letter!r} not in the built-in stroke font") from None
    sx, sy = width / GRID_WIDTH, height / GRID_HEIGHT
    polys: list[np.ndarray] = []
    for points, closed in strokes:
        scaled = np.array([(x * sx, y * sy) for x, y in points])
        if closed:
            polys.extend(shapes.ring_band(scaled, stroke_width))
        else:
            polys.extend(shapes.stroke_segments(scaled, stroke_width))
    return polys


def word_polygons(
    word: str,
    letter_width: float,
    letter_height: float,
    stroke_width: float,
    letter_gap: float,
) -> list[np.ndarray]:
    """Lay out a word along the lateral axis, centered on (0, 0)."""
    letters = [c for c in word.upper() if not c.isspace()]
    if not letters:
        raise ValueError("word must contain at least one letter")
    advance = letter_width + letter_gap
    total = len(letters) * letter_width + (len(letters) - 1) * letter_gap
    start = -total / 2.0
    polys: list[np.ndarray] = []
    for k, letter in enumerate(letters):
        dx = start + k * advance
        dy = -letter_height / 2.0
        for poly in glyph_polygons(letter, letter_width, letter_height, stroke_width):
            polys.append(poly + np.array([dx, dy]))
    return polys
