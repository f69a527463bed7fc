#!/usr/bin/env python3
"""Rasterizes the bundled binary glyph masks (8-bit P5 PGM)."""

import math
import sys
from pathlib import Path

SIZE = 160


def ring(x, y, cx, cy, r_out, r_in):
    d = math.hypot(x - cx, y - cy)
    return r_in <= d <= r_out


def seg(x, y, x0, y0, x1, y1, half_width):
    dx, dy = x1 - x0, y1 - y0
    t = max(0.0, min(1.0, ((x - x0) * dx + (y - y0) * dy) / (dx * dx + dy * dy)))
    return math.hypot(x - (x0 + t * dx), y - (y0 + t * dy)) <= half_width


def registered(x, y):
    c = SIZE / 2
    if ring(x, y, c, c, 76, 66):
        return True
    # Letter R, top of the image at row 0.
    stem = seg(x, y, 56, 44, 56, 116, 6)
    top = seg(x, y, 56, 44, 86, 44, 6)
    mid = seg(x, y, 56, 80, 86, 80, 6)
    bowl = ring(x, y, 86, 62, 24, 12) and x >= 86
    leg = seg(x, y, 80, 80, 106, 116, 6)
    return stem or top or mid or bowl or leg


def two(x, y):
    arc = ring(x, y, 80, 58, 34, 20) and (y <= 58 or x >= 80)
    diagonal = seg(x, y, 108, 66, 48, 126, 8)
    base = seg(x, y, 48, 126, 114, 126, 8)
    return arc or diagonal or base


def write(path, shape):
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (SIZE, SIZE))
        for r in range(SIZE):
            f.write(bytes(255 if shape(c + 0.5, r + 0.5) else 0 for c in range(SIZE)))


if __name__ == "__main__":
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "assets")
    out.mkdir(parents=True, exist_ok=True)
    write(out / "glyph_registered.pgm", registered)
    write(out / "glyph_two.pgm", two)
