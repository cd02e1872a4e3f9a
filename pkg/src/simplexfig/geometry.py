"""Barycentric geometry for regular 2- and 3-simplexes.

A coefficient vector (one non-negative proximity score per pattern, at least
one of them positive) maps to perpendicular face distances, and those
distances pin down exactly one point of the simplex.  Two facts about regular
simplexes make this work: the perpendicular distances from any interior point
to the n+1 facets sum to the simplex height (Viviani's constancy), and the
distances stay proportional to the coefficients under that normalization.

Everything in this module is a pure function over immutable values.
"""

import math
from dataclasses import dataclass
from typing import Sequence

Point = tuple[float, ...]

REL_TOL = 1e-9
# Coefficients this far below the largest one collapse to exactly zero, so
# points land exactly on vertices/edges instead of epsilon-inside.
ZERO_SNAP_RATIO = 1e-12


def _dot(a: Sequence[float], b: Sequence[float]) -> float:
    return sum(x * y for x, y in zip(a, b))


def _sub(a: Sequence[float], b: Sequence[float]) -> tuple[float, ...]:
    return tuple(x - y for x, y in zip(a, b))


def _unit(v: Sequence[float]) -> tuple[float, ...]:
    mag = math.sqrt(_dot(v, v))
    return tuple(c / mag for c in v)


@dataclass(frozen=True)
class CoefficientVector:
    """Proximity coefficients for one observation: all >= 0, at least one > 0."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) not in (3, 4):
            raise ValueError(f"coefficient vector needs 3 or 4 entries, got {len(vals)}")
        if any(v < 0.0 for v in vals):
            raise ValueError(f"coefficients must be non-negative, got {vals}")
        if not any(v > 0.0 for v in vals):
            raise ValueError("coefficients must not all be zero")

    @property
    def arity(self) -> int:
        return len(self.values)

    @property
    def total(self) -> float:
        return sum(self.values)


@dataclass(frozen=True)
class DistanceVector:
    """Perpendicular distances to the simplex faces, summing to ``total``."""

    values: tuple[float, ...]
    total: float

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "total", float(self.total))
        if any(v < 0.0 for v in vals):
            raise ValueError(f"distances must be non-negative, got {vals}")
        if abs(sum(vals) - self.total) > REL_TOL * max(abs(self.total), 1e-300):
            raise ValueError(
                f"distances sum to {sum(vals)!r}, expected {self.total!r}"
            )

    @property
    def arity(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Face:
    """Oriented hyperplane of a simplex; the unit normal points inward."""

    normal: tuple[float, ...]
    offset: float

    def signed_distance(self, point: Sequence[float]) -> float:
        return _dot(self.normal, point) + self.offset


@dataclass(frozen=True)
class SimplexFrame:
    """A regular n-simplex embedding: vertices, inward face planes, height.

    Face i is the facet opposite vertex i, so the distance from vertex i to
    face i equals ``height`` for every i.
    """

    n: int
    edge: float
    vertices: tuple[Point, ...]
    faces: tuple[Face, ...]
    height: float


@dataclass(frozen=True)
class TimeAxis:
    """Examination time range mapped onto the axial length of a prism."""

    t_min: float
    t_max: float
    length: float

    def __post_init__(self):
        object.__setattr__(self, "t_min", float(self.t_min))
        object.__setattr__(self, "t_max", float(self.t_max))
        object.__setattr__(self, "length", float(self.length))
        if self.t_max < self.t_min:
            raise ValueError(f"t_max {self.t_max} precedes t_min {self.t_min}")
        if not self.length > 0.0:
            raise ValueError(f"prism length must be positive, got {self.length}")


def _face_through(points: Sequence[Point], toward: Point) -> Face:
    """Hyperplane through ``points`` with the unit normal facing ``toward``."""
    if len(points[0]) == 2:
        (ax, ay), (bx, by) = points
        normal = _unit((ay - by, bx - ax))
    else:
        a, b, c = points
        u, v = _sub(b, a), _sub(c, a)
        normal = _unit((
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ))
    offset = -_dot(normal, points[0])
    if _dot(normal, toward) + offset < 0.0:
        normal = tuple(-c for c in normal)
        offset = -offset
    return Face(normal, offset)


def simplex_frame(n: int, edge: float) -> SimplexFrame:
    """Build the canonical regular n-simplex with the given edge length.

    n=2 is an equilateral triangle in the plane with its base on the x-axis;
    n=3 is a regular tetrahedron whose base is that triangle and whose apex
    rises along +z.
    """
    if n not in (2, 3):
        raise ValueError(f"unsupported simplex dimension {n}; expected 2 or 3")
    edge = float(edge)
    if not edge > 0.0:
        raise ValueError(f"edge length must be positive, got {edge}")

    s = edge
    if n == 2:
        vertices: tuple[Point, ...] = (
            (0.0, 0.0),
            (s, 0.0),
            (s / 2.0, s * math.sqrt(3.0) / 2.0),
        )
        height = s * math.sqrt(3.0) / 2.0
    else:
        vertices = (
            (0.0, 0.0, 0.0),
            (s, 0.0, 0.0),
            (s / 2.0, s * math.sqrt(3.0) / 2.0, 0.0),
            (s / 2.0, s * math.sqrt(3.0) / 6.0, s * math.sqrt(2.0 / 3.0)),
        )
        height = s * math.sqrt(2.0 / 3.0)

    faces = tuple(
        _face_through(
            [v for j, v in enumerate(vertices) if j != i], vertices[i]
        )
        for i in range(n + 1)
    )
    return SimplexFrame(n=n, edge=edge, vertices=vertices, faces=faces, height=height)


def coefficients_to_distances(
    a: CoefficientVector, frame: SimplexFrame
) -> DistanceVector:
    """Scale coefficients into face distances that sum to the frame height."""
    if a.arity != frame.n + 1:
        raise ValueError(
            f"coefficient arity {a.arity} does not match {frame.n}-simplex"
        )
    top = max(a.values)
    vals = tuple(0.0 if v < ZERO_SNAP_RATIO * top else v for v in a.values)
    scale = frame.height / sum(vals)
    return DistanceVector(tuple(scale * v for v in vals), frame.height)


def distances_to_point(h: DistanceVector, frame: SimplexFrame) -> Point:
    """The unique simplex point whose perpendicular face distances are ``h``.

    Constructed as the barycentric combination of vertices weighted by their
    opposite-face distances: every vertex except vertex i lies on face i, so
    the weights transfer directly into perpendicular distances.
    """
    if h.arity != frame.n + 1:
        raise ValueError(f"distance arity {h.arity} does not match {frame.n}-simplex")
    if abs(h.total - frame.height) > REL_TOL * frame.height:
        raise ValueError(
            f"distance total {h.total!r} does not match frame height {frame.height!r}"
        )
    weights = [v / h.total for v in h.values]
    return tuple(
        sum(w * vertex[k] for w, vertex in zip(weights, frame.vertices))
        for k in range(frame.n)
    )


def point_to_distances(point: Sequence[float], frame: SimplexFrame) -> DistanceVector:
    """Perpendicular distances from a point inside (or on) the simplex."""
    if len(point) != frame.n:
        raise ValueError(f"point has {len(point)} coordinates, frame needs {frame.n}")
    tol = REL_TOL * frame.edge
    dists = []
    for face in frame.faces:
        d = face.signed_distance(point)
        if d < -tol:
            raise ValueError(f"point {tuple(point)} lies outside the simplex")
        dists.append(max(d, 0.0))
    return DistanceVector(tuple(dists), frame.height)


def prism_offset(t: float, axis: TimeAxis) -> float:
    """Axial distance of the time slice for examination moment ``t``.

    A degenerate axis (single examination, t_max == t_min) collapses the
    prism onto its base plane and always yields 0.
    """
    t = float(t)
    if t < axis.t_min or t > axis.t_max:
        raise ValueError(f"timestamp {t} outside [{axis.t_min}, {axis.t_max}]")
    span = axis.t_max - axis.t_min
    if span == 0.0:
        return 0.0
    return axis.length * (t - axis.t_min) / span


def saturation_factor(sum_a: float, ref_sum: float) -> float:
    """Color saturation in [0, 1] for a coefficient sum against a reference."""
    if not ref_sum > 0.0:
        raise ValueError(f"reference sum must be positive, got {ref_sum}")
    if sum_a < 0.0:
        raise ValueError(f"coefficient sum must be non-negative, got {sum_a}")
    return min(1.0, sum_a / ref_sum)
