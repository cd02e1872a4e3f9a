"""Barycentric simplex figures from proximity-coefficient vectors.

Turns coefficient vectors into cognitive-graphics figures: 2-simplex
triangles, 3-simplex tetrahedra, and 2-simplex prisms over time.  The
pieces compose as a pipeline: geometry (coefficients -> face distances ->
point), scene graph, the LNS scene language, projection, and SVG/PNG
emitters, all wired together by the ``simplexfig`` command-line tool.
"""

from .geometry import (
    CoefficientVector,
    DistanceVector,
    Face,
    SimplexFrame,
    TimeAxis,
    coefficients_to_distances,
    distances_to_point,
    point_to_distances,
    prism_offset,
    saturation_factor,
    simplex_frame,
)
from .scene import (
    Diagnostic,
    Marker,
    MarkerRole,
    PerpendicularFan,
    Scene,
    SideLabels,
    SliceTriangle,
    Style,
    Trajectory,
    TrajectoryKind,
    ViewSettings,
    WireSimplex,
    build_prism_scene,
    partition_four_pattern_series,
    scene_to_jsonable,
    validate_scene,
)
from .lns import (
    ArrayIndexError,
    BuiltinCallError,
    EvalError,
    LnsError,
    ParseError,
    Script,
    Token,
    TokenizeError,
    UnboundVariableError,
    UnknownBuiltinError,
    evaluate,
    evaluate_source,
    parse,
    parse_source,
    scene_to_lns,
    standard_registry,
    tokenize,
)
from .render import (
    Camera,
    Disc,
    Label,
    Polygon,
    PolyLine,
    RenderPlan,
    Segment,
    emit_svg,
    parse_color,
    project,
)
from .raster import emit_png, encode_png, rasterize

__version__ = "0.1.0"

__all__ = [
    "ArrayIndexError",
    "BuiltinCallError",
    "Camera",
    "CoefficientVector",
    "Diagnostic",
    "Disc",
    "DistanceVector",
    "EvalError",
    "Face",
    "Label",
    "LnsError",
    "Marker",
    "MarkerRole",
    "ParseError",
    "PerpendicularFan",
    "Polygon",
    "PolyLine",
    "RenderPlan",
    "Scene",
    "Script",
    "Segment",
    "SideLabels",
    "SimplexFrame",
    "SliceTriangle",
    "Style",
    "TimeAxis",
    "Token",
    "TokenizeError",
    "Trajectory",
    "TrajectoryKind",
    "UnboundVariableError",
    "UnknownBuiltinError",
    "ViewSettings",
    "WireSimplex",
    "build_prism_scene",
    "coefficients_to_distances",
    "distances_to_point",
    "emit_png",
    "emit_svg",
    "encode_png",
    "evaluate",
    "evaluate_source",
    "parse",
    "parse_color",
    "parse_source",
    "partition_four_pattern_series",
    "point_to_distances",
    "prism_offset",
    "project",
    "rasterize",
    "saturation_factor",
    "scene_to_jsonable",
    "scene_to_lns",
    "simplex_frame",
    "standard_registry",
    "tokenize",
    "validate_scene",
]
