"""Supersampled rasterizer and PNG encoder for render plans.

Primitives are painted in plan order onto a white canvas at 4x resolution
with hard coverage tests, then box-averaged down, which anti-aliases every
edge the same way on every run.  The PNG encoder writes a plain 8-bit RGBA
image (filter 0, one IDAT), so output bytes are a pure function of the plan.
"""

import struct
import zlib

import numpy as np

from .render import Disc, Label, PolyLine, Polygon, RenderPlan, RenderPrimitive, Segment, parse_color
from .scene import Style

SUPERSAMPLE = 4

# 5x7 glyphs for the pattern digits drawn on simplex sides.  Text beyond
# these characters only appears in SVG output.
_GLYPHS = {
    "0": ("01110", "10001", "10011", "10101", "11001", "10001", "01110"),
    "1": ("00100", "01100", "00100", "00100", "00100", "00100", "01110"),
    "2": ("01110", "10001", "00001", "00010", "00100", "01000", "11111"),
    "3": ("11111", "00010", "00100", "00010", "00001", "10001", "01110"),
    "4": ("00010", "00110", "01010", "10010", "11111", "00010", "00010"),
    "5": ("11111", "10000", "11110", "00001", "00001", "10001", "01110"),
    "6": ("00110", "01000", "10000", "11110", "10001", "10001", "01110"),
    "7": ("11111", "00001", "00010", "00100", "01000", "01000", "01000"),
    "8": ("01110", "10001", "10001", "01110", "10001", "10001", "01110"),
    "9": ("01110", "10001", "10001", "01111", "00001", "00010", "01100"),
    "-": ("00000", "00000", "00000", "11111", "00000", "00000", "00000"),
    " ": ("00000", "00000", "00000", "00000", "00000", "00000", "00000"),
}


def _clip_box(
    x0: float, y0: float, x1: float, y1: float, w: int, h: int
) -> tuple[int, int, int, int] | None:
    ix0 = max(int(np.floor(x0)), 0)
    iy0 = max(int(np.floor(y0)), 0)
    ix1 = min(int(np.ceil(x1)) + 1, w)
    iy1 = min(int(np.ceil(y1)) + 1, h)
    if ix0 >= ix1 or iy0 >= iy1:
        return None
    return ix0, iy0, ix1, iy1


def _pixel_grid(box: tuple[int, int, int, int]):
    ix0, iy0, ix1, iy1 = box
    ys, xs = np.mgrid[iy0:iy1, ix0:ix1]
    return xs + 0.5, ys + 0.5


def _paint(canvas: np.ndarray, box, mask: np.ndarray, color, alpha: float = 1.0):
    ix0, iy0, ix1, iy1 = box
    region = canvas[iy0:iy1, ix0:ix1]
    weight = mask.astype(np.float32)[..., None] * alpha
    region *= 1.0 - weight
    region += weight * np.asarray(color, dtype=np.float32)


def _dash_mask(s: np.ndarray, pattern: tuple[float, ...]) -> np.ndarray:
    spans = list(pattern) if len(pattern) % 2 == 0 else list(pattern) * 2
    bounds = np.cumsum(spans)
    period = bounds[-1]
    phase = np.mod(s, period)
    return np.searchsorted(bounds, phase, side="right") % 2 == 0


def _draw_segment(canvas, p0, p1, style: Style, scale: float):
    h, w = canvas.shape[:2]
    x0, y0 = p0[0] * scale, p0[1] * scale
    x1, y1 = p1[0] * scale, p1[1] * scale
    half = max(style.stroke_width * scale / 2.0, 0.5)
    box = _clip_box(
        min(x0, x1) - half, min(y0, y1) - half, max(x0, x1) + half, max(y0, y1) + half, w, h
    )
    if box is None:
        return
    xs, ys = _pixel_grid(box)
    dx, dy = x1 - x0, y1 - y0
    length = float(np.hypot(dx, dy))
    if length == 0.0:
        dist = np.hypot(xs - x0, ys - y0)
        mask = dist <= half
    else:
        t = np.clip(((xs - x0) * dx + (ys - y0) * dy) / (length * length), 0.0, 1.0)
        dist = np.hypot(xs - (x0 + t * dx), ys - (y0 + t * dy))
        mask = dist <= half
        if not style.is_solid:
            mask &= _dash_mask(t * length, tuple(v * scale for v in style.dash_pattern))
    _paint(canvas, box, mask, parse_color(style.color))


def _draw_disc(canvas, center, radius: float, fill: str, scale: float):
    h, w = canvas.shape[:2]
    cx, cy = center[0] * scale, center[1] * scale
    r = radius * scale
    box = _clip_box(cx - r, cy - r, cx + r, cy + r, w, h)
    if box is None:
        return
    xs, ys = _pixel_grid(box)
    mask = (xs - cx) ** 2 + (ys - cy) ** 2 <= r * r
    _paint(canvas, box, mask, parse_color(fill))


def _draw_polygon(canvas, points, fill: str, opacity: float, scale: float):
    h, w = canvas.shape[:2]
    pts = [(x * scale, y * scale) for x, y in points]
    box = _clip_box(
        min(x for x, _ in pts),
        min(y for _, y in pts),
        max(x for x, _ in pts),
        max(y for _, y in pts),
        w,
        h,
    )
    if box is None:
        return
    xs, ys = _pixel_grid(box)
    inside = np.zeros(xs.shape, dtype=bool)
    n = len(pts)
    for i in range(n):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % n]
        if y0 == y1:
            continue
        crosses = (ys >= min(y0, y1)) & (ys < max(y0, y1))
        x_at = x0 + (ys - y0) * (x1 - x0) / (y1 - y0)
        inside ^= crosses & (xs < x_at)
    _paint(canvas, box, inside, parse_color(fill), alpha=opacity)


def _draw_label(canvas, anchor, text: str, color: str, font_size: float, scale: float):
    cell = font_size * scale / 7.0
    glyph_w = 5 * cell
    known = [c for c in text if c in _GLYPHS]
    if not known:
        return
    total_w = len(known) * glyph_w + (len(known) - 1) * cell
    left = anchor[0] * scale - total_w / 2.0
    top = anchor[1] * scale - font_size * scale / 2.0
    h, w = canvas.shape[:2]
    rgb = np.asarray(parse_color(color), dtype=np.float32)
    for g, ch in enumerate(known):
        gx = left + g * (glyph_w + cell)
        for row, bits in enumerate(_GLYPHS[ch]):
            for col, bit in enumerate(bits):
                if bit != "1":
                    continue
                x0 = int(round(gx + col * cell))
                y0 = int(round(top + row * cell))
                x1 = int(round(gx + (col + 1) * cell))
                y1 = int(round(top + (row + 1) * cell))
                x0, y0 = max(x0, 0), max(y0, 0)
                x1, y1 = min(x1, w), min(y1, h)
                if x0 < x1 and y0 < y1:
                    canvas[y0:y1, x0:x1] = rgb


def _draw(canvas: np.ndarray, prim: RenderPrimitive, scale: float):
    if isinstance(prim, Segment):
        _draw_segment(canvas, prim.p0, prim.p1, prim.style, scale)
    elif isinstance(prim, PolyLine):
        for a, b in zip(prim.points, prim.points[1:]):
            _draw_segment(canvas, a, b, prim.style, scale)
    elif isinstance(prim, Disc):
        _draw_disc(canvas, prim.center, prim.radius, prim.fill, scale)
    elif isinstance(prim, Polygon):
        _draw_polygon(canvas, prim.points, prim.fill, prim.opacity, scale)
    elif isinstance(prim, Label):
        _draw_label(canvas, prim.anchor, prim.text, prim.color, prim.font_size, scale)
    else:
        raise TypeError(f"unknown primitive {prim!r}")


def rasterize(plan: RenderPlan) -> np.ndarray:
    """Paint a plan into an (height, width, 4) uint8 RGBA array."""
    ss = SUPERSAMPLE
    canvas = np.ones((plan.height * ss, plan.width * ss, 3), dtype=np.float32)
    for prim in plan.primitives:
        _draw(canvas, prim, float(ss))
    small = canvas.reshape(plan.height, ss, plan.width, ss, 3).mean(axis=(1, 3))
    rgb = np.clip(np.rint(small * 255.0), 0, 255).astype(np.uint8)
    alpha = np.full((plan.height, plan.width, 1), 255, dtype=np.uint8)
    return np.concatenate([rgb, alpha], axis=2)


def _chunk(kind: bytes, payload: bytes) -> bytes:
    crc = zlib.crc32(payload, zlib.crc32(kind))
    return struct.pack(">I", len(payload)) + kind + payload + struct.pack(">I", crc)


def encode_png(rgba: np.ndarray) -> bytes:
    """Encode an (h, w, 4) uint8 array as a non-interlaced 8-bit RGBA PNG."""
    h, w = rgba.shape[:2]
    header = struct.pack(">IIBBBBB", w, h, 8, 6, 0, 0, 0)
    raw = b"".join(b"\x00" + rgba[y].tobytes() for y in range(h))
    return b"".join(
        [
            b"\x89PNG\r\n\x1a\n",
            _chunk(b"IHDR", header),
            _chunk(b"IDAT", zlib.compress(raw)),
            _chunk(b"IEND", b""),
        ]
    )


def emit_png(plan: RenderPlan) -> bytes:
    """Rasterize a plan and encode it as PNG bytes."""
    return encode_png(rasterize(plan))
