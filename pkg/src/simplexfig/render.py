"""Projection of scenes to depth-ordered planar primitives, plus SVG output.

3D scenes (tetrahedra and prisms) are spun by azimuth, tilted by elevation
about the scene center, and projected orthographically or with a perspective
divide.  2D scenes pass straight through.  Either way the result is uniformly
scaled and centered into the viewport with a 5% margin, and primitives come
out sorted farthest-first so emitters can paint in order.
"""

import colorsys
import math
import re
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence
from xml.sax.saxutils import escape

from .geometry import (
    CoefficientVector,
    coefficients_to_distances,
    distances_to_point,
    prism_offset,
    saturation_factor,
)
from .scene import (
    Marker,
    PerpendicularFan,
    Scene,
    SideLabels,
    SliceTriangle,
    Style,
    Trajectory,
    ViewSettings,
    WireSimplex,
)

MARGIN_FRACTION = 0.05
LABEL_OUTSET_FRACTION = 0.08
MIN_VIEWPORT = 64

_HEX_COLOR_RE = re.compile(r"#([0-9a-fA-F]{3}|[0-9a-fA-F]{6})\Z")


def parse_color(text: str) -> tuple[float, float, float]:
    """Parse "#RGB" or "#RRGGBB" into an RGB triple in [0, 1]."""
    m = _HEX_COLOR_RE.match(text)
    if not m:
        raise ValueError(f"malformed color {text!r}")
    digits = m.group(1)
    if len(digits) == 3:
        digits = "".join(c + c for c in digits)
    return tuple(int(digits[i : i + 2], 16) / 255.0 for i in (0, 2, 4))


def _with_saturation(color: str, factor: float) -> str:
    """Scale the HSV saturation of a color, returning "#RRGGBB"."""
    r, g, b = parse_color(color)
    h, s, v = colorsys.rgb_to_hsv(r, g, b)
    r, g, b = colorsys.hsv_to_rgb(h, s * factor, v)
    return "#%02X%02X%02X" % tuple(round(c * 255) for c in (r, g, b))


@dataclass(frozen=True)
class Camera:
    """View direction (degrees) and projection mode."""

    azimuth_deg: float = 15.0
    elevation_deg: float = 65.0
    perspective: bool = False
    focal: float = 4.0  # eye distance in units of the scene radius

    def __post_init__(self):
        if not self.focal > 0.0:
            raise ValueError(f"focal must be positive, got {self.focal}")

    @classmethod
    def from_view(cls, view: ViewSettings) -> "Camera":
        return cls(
            azimuth_deg=view.azimuth_deg,
            elevation_deg=view.elevation_deg,
            perspective=view.transform_mode == 1,
        )


Point2 = tuple[float, float]


@dataclass(frozen=True)
class Segment:
    p0: Point2
    p1: Point2
    style: Style
    depth: float = 0.0
    tag: str = ""


@dataclass(frozen=True)
class PolyLine:
    points: tuple[Point2, ...]
    style: Style
    depth: float = 0.0
    tag: str = ""


@dataclass(frozen=True)
class Disc:
    center: Point2
    radius: float
    fill: str
    depth: float = 0.0
    tag: str = ""


@dataclass(frozen=True)
class Polygon:
    points: tuple[Point2, ...]
    fill: str
    opacity: float = 1.0
    depth: float = 0.0
    tag: str = ""

    def __post_init__(self):
        if not 0.0 <= self.opacity <= 1.0:
            raise ValueError(f"opacity must be in [0, 1], got {self.opacity}")


@dataclass(frozen=True)
class Label:
    anchor: Point2
    text: str
    color: str
    font_size: float = 14.0
    depth: float = 0.0
    tag: str = ""


RenderPrimitive = Segment | PolyLine | Disc | Polygon | Label


@dataclass(frozen=True)
class RenderPlan:
    """Viewport dimensions plus primitives sorted farthest-first."""

    width: int
    height: int
    primitives: tuple[RenderPrimitive, ...]


Point3 = tuple[float, float, float]
_Builder = Callable[[list[Point2], float], RenderPrimitive]
_StagedPrim = tuple[list[Point3], _Builder]


def _lift(p: Sequence[float], z: float = 0.0) -> Point3:
    if len(p) == 3:
        return (p[0], p[1], p[2])
    return (p[0], p[1], z)


def _placement(scene: Scene, coeffs: CoefficientVector, timestamp: float | None) -> Point3:
    h = coefficients_to_distances(coeffs, scene.frame)
    p = distances_to_point(h, scene.frame)
    z = 0.0
    if scene.frame.n == 2 and scene.prism_axis is not None and timestamp is not None:
        z = prism_offset(timestamp, scene.prism_axis)
    return _lift(p, z)


def _fan_segments(
    scene: Scene, fan: PerpendicularFan
) -> Iterator[tuple[Point3, Point3, str]]:
    frame = scene.frame
    h = coefficients_to_distances(fan.coefficients, frame)
    p = distances_to_point(h, frame)
    z = 0.0
    if frame.n == 2 and scene.prism_axis is not None and fan.timestamp is not None:
        z = prism_offset(fan.timestamp, scene.prism_axis)
    tip = _lift(p, z)
    for i, face in enumerate(frame.faces):
        foot = tuple(p[k] - h.values[i] * face.normal[k] for k in range(frame.n))
        yield tip, _lift(foot, z), fan.per_side_colors[i]


def _saturation_reference(scene: Scene, override: float | None) -> float | None:
    if override is not None:
        return override
    if scene.saturation_ref is not None:
        return scene.saturation_ref
    sums = [
        m.saturation_sum if m.saturation_sum is not None else m.coefficients.total
        for m in scene.items
        if isinstance(m, Marker)
    ]
    return max(sums) if sums else None


def _stage_scene(scene: Scene, saturation_ref: float | None) -> list[_StagedPrim]:
    """Expand scene items into world-space primitives with deferred builders."""
    frame = scene.frame
    axis = scene.prism_axis
    ref = _saturation_reference(scene, saturation_ref)
    staged: list[_StagedPrim] = []

    def add_segment(a: Point3, b: Point3, style: Style, tag: str):
        staged.append(
            (
                [a, b],
                lambda pts, depth, style=style, tag=tag: Segment(
                    pts[0], pts[1], style, depth=depth, tag=tag
                ),
            )
        )

    def slice_corners(offset: float) -> list[Point3]:
        return [_lift(v, offset) for v in frame.vertices]

    for item in scene.items:
        if isinstance(item, WireSimplex):
            if item.prism:
                if axis is None:
                    raise ValueError("prism wireframe in a scene without a time axis")
                base = slice_corners(0.0)
                top = slice_corners(axis.length)
                for ring in (base, top):
                    for i in range(3):
                        add_segment(ring[i], ring[(i + 1) % 3], item.style, "prism-edge")
                for a, b in zip(base, top):
                    add_segment(a, b, item.style, "prism-edge")
            else:
                verts = [_lift(v) for v in frame.vertices]
                for i in range(len(verts)):
                    for j in range(i + 1, len(verts)):
                        add_segment(verts[i], verts[j], item.style, "simplex-edge")
        elif isinstance(item, SliceTriangle):
            corners = slice_corners(item.offset)
            staged.append(
                (
                    list(corners),
                    lambda pts, depth, item=item: Polygon(
                        tuple(pts),
                        fill=item.style.color,
                        opacity=item.opacity,
                        depth=depth,
                        tag="slice-face",
                    ),
                )
            )
            for i in range(3):
                add_segment(corners[i], corners[(i + 1) % 3], item.style, "slice-edge")
        elif isinstance(item, Marker):
            pos = _placement(scene, item.coefficients, item.timestamp)
            total = (
                item.saturation_sum
                if item.saturation_sum is not None
                else item.coefficients.total
            )
            fill = item.style.color
            if ref is not None:
                fill = _with_saturation(fill, saturation_factor(total, ref))
            staged.append(
                (
                    [pos],
                    lambda pts, depth, item=item, fill=fill: Disc(
                        pts[0], item.radius, fill, depth=depth, tag="marker"
                    ),
                )
            )
        elif isinstance(item, PerpendicularFan):
            for tip, foot, color in _fan_segments(scene, item):
                stroke = Style(
                    color=color,
                    stroke_width=item.style.stroke_width,
                    dash_pattern=item.style.dash_pattern,
                )
                add_segment(tip, foot, stroke, "perpendicular")
        elif isinstance(item, Trajectory):
            points = [
                _placement(scene, cv, t) for cv, t in item.waypoints
            ]
            # Split per segment so depth sorting can interleave primitives.
            for a, b in zip(points, points[1:]):
                add_segment(a, b, item.style, "trajectory")
        elif isinstance(item, SideLabels):
            if not scene.show_digits:
                continue
            for i, face in enumerate(frame.faces):
                others = [v for j, v in enumerate(frame.vertices) if j != i]
                mid = tuple(
                    sum(v[k] for v in others) / len(others) for k in range(frame.n)
                )
                anchor = tuple(
                    mid[k] - LABEL_OUTSET_FRACTION * frame.edge * face.normal[k]
                    for k in range(frame.n)
                )
                text = item.texts[i] if i < len(item.texts) else ""
                staged.append(
                    (
                        [_lift(anchor)],
                        lambda pts, depth, item=item, text=text: Label(
                            pts[0],
                            text,
                            item.style.color,
                            font_size=item.font_size,
                            depth=depth,
                            tag="side-label",
                        ),
                    )
                )
    return staged


def project(
    scene: Scene,
    camera: Camera | None = None,
    width: int = 800,
    height: int = 600,
    saturation_ref: float | None = None,
) -> RenderPlan:
    """Project a scene into a depth-sorted render plan for a viewport."""
    if width < MIN_VIEWPORT or height < MIN_VIEWPORT:
        raise ValueError(f"degenerate viewport {width}x{height}; minimum is {MIN_VIEWPORT}")
    if not scene.items:
        raise ValueError("empty scene")
    if camera is None:
        camera = Camera.from_view(scene.view)

    staged = _stage_scene(scene, saturation_ref)
    world = [p for pts, _build in staged for p in pts]
    if not world:
        raise ValueError("scene has no drawable geometry")

    center = tuple(
        (min(p[k] for p in world) + max(p[k] for p in world)) / 2.0 for k in range(3)
    )
    three_d = scene.frame.n == 3 or scene.prism_axis is not None

    def to_camera(p: Point3) -> Point3:
        if not three_d:
            return (p[0] - center[0], p[1] - center[1], 0.0)
        az = math.radians(camera.azimuth_deg)
        el = math.radians(camera.elevation_deg)
        x, y, z = (p[0] - center[0], p[1] - center[1], p[2] - center[2])
        x1 = x * math.cos(az) - y * math.sin(az)
        y1 = x * math.sin(az) + y * math.cos(az)
        y2 = y1 * math.cos(el) + z * math.sin(el)
        z2 = -y1 * math.sin(el) + z * math.cos(el)
        return (x1, y2, -z2)

    cam_pts = [to_camera(p) for p in world]
    if camera.perspective and three_d:
        radius = max(math.sqrt(x * x + y * y + d * d) for x, y, d in cam_pts) or 1.0
        eye = camera.focal * radius
        cam_pts = [
            (
                x * eye / max(eye + d, 0.05 * radius),
                y * eye / max(eye + d, 0.05 * radius),
                d,
            )
            for x, y, d in cam_pts
        ]

    xs = [p[0] for p in cam_pts]
    ys = [p[1] for p in cam_pts]
    span_x = max(xs) - min(xs)
    span_y = max(ys) - min(ys)
    avail_x = width * (1.0 - 2.0 * MARGIN_FRACTION)
    avail_y = height * (1.0 - 2.0 * MARGIN_FRACTION)
    scales = []
    if span_x > 0.0:
        scales.append(avail_x / span_x)
    if span_y > 0.0:
        scales.append(avail_y / span_y)
    scale = min(scales) if scales else 1.0
    mid_x = (max(xs) + min(xs)) / 2.0
    mid_y = (max(ys) + min(ys)) / 2.0

    def to_screen(p: Point3) -> Point2:
        # The screen y axis points down; scene y points up.
        return (
            width / 2.0 + (p[0] - mid_x) * scale,
            height / 2.0 - (p[1] - mid_y) * scale,
        )

    primitives: list[RenderPrimitive] = []
    cursor = 0
    for pts, build in staged:
        chunk = cam_pts[cursor : cursor + len(pts)]
        cursor += len(pts)
        depth = sum(p[2] for p in chunk) / len(chunk)
        primitives.append(build([to_screen(p) for p in chunk], depth))

    order = sorted(range(len(primitives)), key=lambda i: (-primitives[i].depth, i))
    return RenderPlan(width=width, height=height, primitives=tuple(primitives[i] for i in order))


# ---------------------------------------------------------------------------
# SVG emission


def _f(v: float) -> str:
    return f"{v:.6f}"


def _dash_attr(style: Style) -> str:
    if style.is_solid:
        return ""
    return ' stroke-dasharray="' + " ".join(_f(v) for v in style.dash_pattern) + '"'


def _svg_element(prim: RenderPrimitive) -> str:
    if isinstance(prim, Segment):
        return (
            f'<line class="{prim.tag}" x1="{_f(prim.p0[0])}" y1="{_f(prim.p0[1])}" '
            f'x2="{_f(prim.p1[0])}" y2="{_f(prim.p1[1])}" stroke="{prim.style.color}" '
            f'stroke-width="{_f(prim.style.stroke_width)}"{_dash_attr(prim.style)}/>'
        )
    if isinstance(prim, PolyLine):
        points = " ".join(f"{_f(x)},{_f(y)}" for x, y in prim.points)
        return (
            f'<polyline class="{prim.tag}" points="{points}" fill="none" '
            f'stroke="{prim.style.color}" stroke-width="{_f(prim.style.stroke_width)}"'
            f"{_dash_attr(prim.style)}/>"
        )
    if isinstance(prim, Disc):
        return (
            f'<circle class="{prim.tag}" cx="{_f(prim.center[0])}" '
            f'cy="{_f(prim.center[1])}" r="{_f(prim.radius)}" fill="{prim.fill}"/>'
        )
    if isinstance(prim, Polygon):
        points = " ".join(f"{_f(x)},{_f(y)}" for x, y in prim.points)
        return (
            f'<polygon class="{prim.tag}" points="{points}" fill="{prim.fill}" '
            f'fill-opacity="{_f(prim.opacity)}"/>'
        )
    if isinstance(prim, Label):
        return (
            f'<text class="{prim.tag}" x="{_f(prim.anchor[0])}" '
            f'y="{_f(prim.anchor[1])}" font-size="{_f(prim.font_size)}" '
            f'fill="{prim.color}" text-anchor="middle">{escape(prim.text)}</text>'
        )
    raise TypeError(f"unknown primitive {prim!r}")


def emit_svg(plan: RenderPlan) -> str:
    """Serialize a plan as a deterministic SVG 1.1 document.

    One element per primitive in plan order, after a white background rect.
    """
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{plan.width}" height="{plan.height}" '
        f'viewBox="0 0 {plan.width} {plan.height}">',
        f'<rect class="background" x="0" y="0" width="{plan.width}" '
        f'height="{plan.height}" fill="#FFFFFF"/>',
    ]
    parts.extend(_svg_element(p) for p in plan.primitives)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
