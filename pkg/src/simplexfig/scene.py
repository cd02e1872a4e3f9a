"""Scene graph for simplex figures.

A Scene is an ordered collection of styled primitives (wireframes, markers,
perpendicular fans, polylines, time slices, side labels) over one simplex
frame, optionally extruded along a time axis.  Construction helpers cover the
two patterns that need real logic: building a prism scene from a timestamped
sample series, and splitting a four-pattern recovery series across two prisms.
Completed scenes are immutable; renderers rely on item insertion order.
"""

import enum
import re
from dataclasses import dataclass
from typing import Sequence

from .geometry import (
    CoefficientVector,
    SimplexFrame,
    TimeAxis,
    prism_offset,
)

_COLOR_RE = re.compile(r"#([0-9a-fA-F]{3}|[0-9a-fA-F]{6})\Z")

DEFAULT_STUDY_RADIUS = 6.0
DEFAULT_SAMPLE_RADIUS = 3.0
DEFAULT_SLICE_OPACITY = 0.15


def is_color(text: str) -> bool:
    return bool(_COLOR_RE.match(text))


@dataclass(frozen=True)
class Style:
    """Stroke styling; a dash pattern of () or (1,) means a solid line."""

    color: str = "#000000"
    stroke_width: float = 1.0
    dash_pattern: tuple[float, ...] = (1.0,)

    def __post_init__(self):
        object.__setattr__(self, "stroke_width", float(self.stroke_width))
        object.__setattr__(
            self, "dash_pattern", tuple(float(v) for v in self.dash_pattern)
        )
        if not is_color(self.color):
            raise ValueError(f"malformed color {self.color!r}")
        if not self.stroke_width > 0.0:
            raise ValueError(f"stroke width must be positive, got {self.stroke_width}")
        if any(not v > 0.0 for v in self.dash_pattern):
            raise ValueError(f"dash entries must be positive, got {self.dash_pattern}")

    @property
    def is_solid(self) -> bool:
        return self.dash_pattern in ((), (1.0,))


class MarkerRole(enum.Enum):
    OBJECT_UNDER_STUDY = "ObjectUnderStudy"
    LEARNING_SAMPLE = "LearningSample"


class TrajectoryKind(enum.Enum):
    OBSERVED = "Observed"
    PREDICTED = "Predicted"
    CANDIDATE_STRATEGY = "CandidateStrategy"


@dataclass(frozen=True)
class WireSimplex:
    """Simplex wireframe; with ``prism`` set it extrudes along the time axis."""

    style: Style = Style()
    prism: bool = False


@dataclass(frozen=True)
class SliceTriangle:
    """Cross-section triangle of a prism at one examination moment."""

    timestamp: float
    offset: float
    style: Style = Style()
    opacity: float = DEFAULT_SLICE_OPACITY

    def __post_init__(self):
        object.__setattr__(self, "timestamp", float(self.timestamp))
        object.__setattr__(self, "offset", float(self.offset))
        object.__setattr__(self, "opacity", float(self.opacity))
        if not 0.0 <= self.opacity <= 1.0:
            raise ValueError(f"opacity must be in [0, 1], got {self.opacity}")


@dataclass(frozen=True)
class Marker:
    """A circle for one observation, placed by its coefficient vector.

    Large-radius markers are the objects under study; small ones belong to
    the learning sample.
    """

    coefficients: CoefficientVector
    radius: float
    style: Style
    shape: str = "Circle"
    role: MarkerRole = MarkerRole.OBJECT_UNDER_STUDY
    timestamp: float | None = None
    saturation_sum: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "radius", float(self.radius))
        if self.shape != "Circle":
            raise ValueError(f"unsupported marker shape {self.shape!r}")
        if not self.radius > 0.0:
            raise ValueError(f"marker radius must be positive, got {self.radius}")
        if self.timestamp is not None:
            object.__setattr__(self, "timestamp", float(self.timestamp))
        if self.saturation_sum is not None and self.saturation_sum < 0.0:
            raise ValueError("saturation sum must be non-negative")


@dataclass(frozen=True)
class PerpendicularFan:
    """Colored perpendicular segments from a placed point to every face."""

    coefficients: CoefficientVector
    per_side_colors: tuple[str, ...]
    style: Style = Style()
    timestamp: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "per_side_colors", tuple(self.per_side_colors))
        for c in self.per_side_colors:
            if not is_color(c):
                raise ValueError(f"malformed side color {c!r}")
        if self.timestamp is not None:
            object.__setattr__(self, "timestamp", float(self.timestamp))


@dataclass(frozen=True)
class Trajectory:
    """Observations connected by a polyline, in order."""

    waypoints: tuple[tuple[CoefficientVector, float | None], ...]
    style: Style = Style()
    kind: TrajectoryKind = TrajectoryKind.OBSERVED

    def __post_init__(self):
        object.__setattr__(
            self,
            "waypoints",
            tuple(
                (cv, None if t is None else float(t)) for cv, t in self.waypoints
            ),
        )
        if len(self.waypoints) < 2:
            raise ValueError("a trajectory needs at least 2 waypoints")


@dataclass(frozen=True)
class SideLabels:
    """Per-side pattern digits, shown only when the scene asks for digits."""

    texts: tuple[str, ...]
    style: Style = Style()
    font_size: float = 14.0

    def __post_init__(self):
        object.__setattr__(self, "texts", tuple(str(t) for t in self.texts))
        object.__setattr__(self, "font_size", float(self.font_size))
        if not self.font_size > 0.0:
            raise ValueError("font size must be positive")


@dataclass(frozen=True)
class ViewSettings:
    """View preset, projection mode (0 orthographic / 1 perspective), angles."""

    view_preset: int = 0
    transform_mode: int = 0
    azimuth_deg: float = 15.0
    elevation_deg: float = 65.0


SceneItem = (
    WireSimplex | SliceTriangle | Marker | PerpendicularFan | Trajectory | SideLabels
)


@dataclass(frozen=True)
class Scene:
    """An immutable, ordered figure description over one simplex frame."""

    frame: SimplexFrame
    items: tuple[SceneItem, ...]
    prism_axis: TimeAxis | None = None
    view: ViewSettings = ViewSettings()
    show_digits: bool = False
    saturation_ref: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding: the offending item index (None = scene-level),
    the violated rule, and a human-readable message."""

    index: int | None
    rule: str
    message: str


def build_prism_scene(
    samples: Sequence[tuple[float, CoefficientVector, Style]],
    axis: TimeAxis,
    frame: SimplexFrame,
    *,
    wire_style: Style = Style(),
    slice_style: Style = Style(),
    trajectory_style: Style = Style(),
) -> Scene:
    """Assemble a prism scene from a timestamped sample series.

    Produces the prism wireframe, one slice triangle per distinct timestamp,
    one marker per sample placed in its slice, and (for two or more samples)
    one observed trajectory through all samples in time order.
    """
    if frame.n != 2:
        raise ValueError("prism scenes are built over a 2-simplex frame")
    if not samples:
        raise ValueError("sample list is empty")
    for t, cv, _style in samples:
        if cv.arity != 3:
            raise ValueError(f"prism samples need 3 coefficients, got {cv.arity}")
        prism_offset(t, axis)  # range check

    ordered = sorted(enumerate(samples), key=lambda pair: (pair[1][0], pair[0]))
    items: list[SceneItem] = [WireSimplex(style=wire_style, prism=True)]
    seen_t: float | None = None
    for _idx, (t, cv, style) in ordered:
        if seen_t is None or t != seen_t:
            items.append(
                SliceTriangle(timestamp=t, offset=prism_offset(t, axis), style=slice_style)
            )
            seen_t = t
        items.append(
            Marker(
                coefficients=cv,
                radius=DEFAULT_STUDY_RADIUS,
                style=style,
                timestamp=t,
            )
        )
    if len(ordered) >= 2:
        items.append(
            Trajectory(
                waypoints=tuple((cv, t) for _i, (t, cv, _s) in ordered),
                style=trajectory_style,
                kind=TrajectoryKind.OBSERVED,
            )
        )
    return Scene(frame=frame, items=tuple(items), prism_axis=axis)


_FIRST_TRIPLE = frozenset({1, 2, 3})
_SECOND_TRIPLE = frozenset({0, 1, 2})


def partition_four_pattern_series(
    samples: Sequence[tuple[float, int]],
) -> tuple[tuple[tuple[float, int], ...], tuple[tuple[float, int], ...]]:
    """Split a recovery series over stages {3,2,1,0} across two prisms.

    The first subseries covers stages 3-1, the second stages 2-0; transition
    samples land in both.  A series that already fits one triple comes back
    whole on that side with the other side empty.
    """
    if not samples:
        raise ValueError("sample list is empty")
    ordered = tuple(
        (float(t), int(stage))
        for t, stage in sorted(samples, key=lambda pair: pair[0])
    )
    stages = [stage for _t, stage in ordered]
    for stage in stages:
        if stage not in (0, 1, 2, 3):
            raise ValueError(f"stage label {stage} outside 0..3")
    for prev, cur in zip(stages, stages[1:]):
        if cur > prev:
            raise ValueError("stages must be non-increasing over time")

    if all(stage in _FIRST_TRIPLE for stage in stages):
        return ordered, ()
    if all(stage in _SECOND_TRIPLE for stage in stages):
        return (), ordered
    first_zero = next(i for i, stage in enumerate(stages) if stage == 0)
    first_low = next(i for i, stage in enumerate(stages) if stage in _SECOND_TRIPLE)
    return ordered[:first_zero], ordered[first_low:]


def _check_arity(diags, index, arity, frame):
    if arity != frame.n + 1:
        diags.append(
            Diagnostic(
                index,
                "coefficient-arity",
                f"coefficient arity {arity} does not match "
                f"{frame.n}-simplex (needs {frame.n + 1})",
            )
        )


def validate_scene(scene: Scene) -> list[Diagnostic]:
    """Check cross-item invariants; an empty result means the scene is sound."""
    diags: list[Diagnostic] = []
    frame = scene.frame
    axis = scene.prism_axis

    if scene.view.transform_mode not in (0, 1):
        diags.append(
            Diagnostic(
                None,
                "transform-mode",
                f"transform mode must be 0 or 1, got {scene.view.transform_mode}",
            )
        )
    if axis is not None and frame.n != 2:
        diags.append(
            Diagnostic(None, "prism-context", "a time axis requires a 2-simplex frame")
        )

    def in_axis(t: float) -> bool:
        return axis is not None and axis.t_min <= t <= axis.t_max

    study_radii: list[tuple[int, float]] = []
    sample_radii: list[float] = []
    for index, item in enumerate(scene.items):
        if isinstance(item, Marker):
            _check_arity(diags, index, item.coefficients.arity, frame)
            if item.role is MarkerRole.OBJECT_UNDER_STUDY:
                study_radii.append((index, item.radius))
            else:
                sample_radii.append(item.radius)
            if item.timestamp is not None:
                if axis is None:
                    diags.append(
                        Diagnostic(
                            index,
                            "prism-context",
                            "timestamp set but the scene has no time axis",
                        )
                    )
                elif not in_axis(item.timestamp):
                    diags.append(
                        Diagnostic(
                            index,
                            "timestamp-range",
                            f"timestamp {item.timestamp} outside the time axis",
                        )
                    )
        elif isinstance(item, PerpendicularFan):
            _check_arity(diags, index, item.coefficients.arity, frame)
            if len(item.per_side_colors) != frame.n + 1:
                diags.append(
                    Diagnostic(
                        index,
                        "fan-color-arity",
                        f"{len(item.per_side_colors)} side colors for "
                        f"{frame.n + 1} faces",
                    )
                )
            if item.timestamp is not None and axis is None:
                diags.append(
                    Diagnostic(
                        index,
                        "prism-context",
                        "timestamp set but the scene has no time axis",
                    )
                )
        elif isinstance(item, Trajectory):
            for cv, _t in item.waypoints:
                _check_arity(diags, index, cv.arity, frame)
            if axis is not None:
                times = [t for _cv, t in item.waypoints]
                if any(t is None for t in times):
                    diags.append(
                        Diagnostic(
                            index,
                            "trajectory-timestamps",
                            "prism trajectories need a timestamp on every waypoint",
                        )
                    )
                else:
                    if any(b < a for a, b in zip(times, times[1:])):
                        diags.append(
                            Diagnostic(
                                index,
                                "trajectory-order",
                                "waypoint timestamps decrease",
                            )
                        )
                    if any(not in_axis(t) for t in times):
                        diags.append(
                            Diagnostic(
                                index,
                                "timestamp-range",
                                "waypoint timestamp outside the time axis",
                            )
                        )
            elif any(t is not None for _cv, t in item.waypoints):
                diags.append(
                    Diagnostic(
                        index,
                        "prism-context",
                        "waypoint timestamps set but the scene has no time axis",
                    )
                )
        elif isinstance(item, SliceTriangle):
            if axis is None:
                diags.append(
                    Diagnostic(
                        index,
                        "prism-context",
                        "slice triangle in a scene without a time axis",
                    )
                )
            elif not in_axis(item.timestamp):
                diags.append(
                    Diagnostic(
                        index,
                        "timestamp-range",
                        f"slice timestamp {item.timestamp} outside the time axis",
                    )
                )
        elif isinstance(item, WireSimplex):
            if item.prism and axis is None:
                diags.append(
                    Diagnostic(
                        index,
                        "prism-context",
                        "prism wireframe in a scene without a time axis",
                    )
                )
        elif isinstance(item, SideLabels):
            if len(item.texts) != frame.n + 1:
                diags.append(
                    Diagnostic(
                        index,
                        "label-arity",
                        f"{len(item.texts)} labels for {frame.n + 1} sides",
                    )
                )

    if study_radii and sample_radii:
        ceiling = max(sample_radii)
        for index, radius in study_radii:
            if radius <= ceiling:
                diags.append(
                    Diagnostic(
                        index,
                        "marker-radius-order",
                        f"study-object radius {radius} not greater than "
                        f"largest learning-sample radius {ceiling}",
                    )
                )
    return diags


def scene_to_jsonable(scene: Scene) -> dict:
    """Stable plain-data form of a scene, for serialization and comparison."""

    def style(s: Style) -> dict:
        return {
            "color": s.color,
            "stroke_width": s.stroke_width,
            "dash_pattern": list(s.dash_pattern),
        }

    items = []
    for item in scene.items:
        if isinstance(item, WireSimplex):
            items.append({"type": "WireSimplex", "style": style(item.style), "prism": item.prism})
        elif isinstance(item, SliceTriangle):
            items.append(
                {
                    "type": "SliceTriangle",
                    "timestamp": item.timestamp,
                    "offset": item.offset,
                    "style": style(item.style),
                    "opacity": item.opacity,
                }
            )
        elif isinstance(item, Marker):
            items.append(
                {
                    "type": "Marker",
                    "coefficients": list(item.coefficients.values),
                    "radius": item.radius,
                    "shape": item.shape,
                    "role": item.role.value,
                    "style": style(item.style),
                    "timestamp": item.timestamp,
                    "saturation_sum": item.saturation_sum,
                }
            )
        elif isinstance(item, PerpendicularFan):
            items.append(
                {
                    "type": "PerpendicularFan",
                    "coefficients": list(item.coefficients.values),
                    "per_side_colors": list(item.per_side_colors),
                    "style": style(item.style),
                    "timestamp": item.timestamp,
                }
            )
        elif isinstance(item, Trajectory):
            items.append(
                {
                    "type": "Trajectory",
                    "waypoints": [
                        {"coefficients": list(cv.values), "timestamp": t}
                        for cv, t in item.waypoints
                    ],
                    "style": style(item.style),
                    "kind": item.kind.value,
                }
            )
        elif isinstance(item, SideLabels):
            items.append(
                {
                    "type": "SideLabels",
                    "texts": list(item.texts),
                    "style": style(item.style),
                    "font_size": item.font_size,
                }
            )
    return {
        "frame": {"n": scene.frame.n, "edge": scene.frame.edge, "height": scene.frame.height},
        "prism_axis": None
        if scene.prism_axis is None
        else {
            "t_min": scene.prism_axis.t_min,
            "t_max": scene.prism_axis.t_max,
            "length": scene.prism_axis.length,
        },
        "view": {
            "view_preset": scene.view.view_preset,
            "transform_mode": scene.view.transform_mode,
            "azimuth_deg": scene.view.azimuth_deg,
            "elevation_deg": scene.view.elevation_deg,
        },
        "show_digits": scene.show_digits,
        "saturation_ref": scene.saturation_ref,
        "items": items,
    }
