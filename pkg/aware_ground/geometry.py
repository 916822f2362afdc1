"""Planar and spatial primitives: distance, law of cosines, arc drop, signed
distance to an oriented line, and the stadium (capsule) region test.

All functions are pure. Angles are radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from aware_ground.errors import DegenerateTriangle, GeometryError, OutOfDomain

# Relative slack on the triangle inequality; flat triangles from collinear
# points must still pass after rounding.
TRIANGLE_TOLERANCE = 1e-12
UNIT_TOLERANCE = 1e-12


def _check_finite(name: str, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise GeometryError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self) -> None:
        _check_finite("Point2", self.x, self.y)

    def __sub__(self, other: Point2) -> Point2:
        return Point2(self.x - other.x, self.y - other.y)

    def __add__(self, other: Point2) -> Point2:
        return Point2(self.x + other.x, self.y + other.y)

    def scaled(self, k: float) -> Point2:
        return Point2(self.x * k, self.y * k)


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        _check_finite("Point3", self.x, self.y, self.z)

    @property
    def xy(self) -> Point2:
        return Point2(self.x, self.y)


@dataclass(frozen=True)
class TriangleSides:
    """x is opposite the queried angle; y and z are adjacent to it."""

    x: float
    y: float
    z: float


@dataclass(frozen=True)
class ArcGeometry:
    """Circular arc of radius R dropping Yd over horizontal distance D."""

    R: float
    D: float
    Yd: float

    @classmethod
    def of(cls, R: float, D: float) -> ArcGeometry:
        return cls(R, D, arc_drop(R, D))


@dataclass(frozen=True)
class OrientedLine2:
    origin: Point2
    direction: Point2

    def __post_init__(self) -> None:
        norm = math.hypot(self.direction.x, self.direction.y)
        if abs(norm - 1.0) > UNIT_TOLERANCE:
            raise GeometryError(f"line direction must be a unit vector, norm={norm!r}")

    @classmethod
    def through(cls, origin: Point2, toward: Point2) -> OrientedLine2:
        dx, dy = toward.x - origin.x, toward.y - origin.y
        norm = math.hypot(dx, dy)
        if norm == 0.0:
            raise GeometryError("line needs two distinct points")
        return cls(origin, Point2(dx / norm, dy / norm))

    def reversed(self) -> OrientedLine2:
        return OrientedLine2(self.origin, Point2(-self.direction.x, -self.direction.y))


@dataclass(frozen=True)
class StadiumShape:
    """Points within `radius` of the segment [focus_a, focus_b]."""

    focus_a: Point2
    focus_b: Point2
    radius: float

    def __post_init__(self) -> None:
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise GeometryError(f"stadium radius must be > 0, got {self.radius!r}")


def distance(p: Point2, q: Point2) -> float:
    return math.hypot(q.x - p.x, q.y - p.y)


def distance3(p: Point3, q: Point3) -> float:
    return math.sqrt((q.x - p.x) ** 2 + (q.y - p.y) ** 2 + (q.z - p.z) ** 2)


def angle_at_vertex(sides: TriangleSides) -> float:
    """Angle between sides y and z (opposite x), standard law of cosines."""
    x, y, z = sides.x, sides.y, sides.z
    if not (x > 0 and y > 0 and z > 0):
        raise DegenerateTriangle(f"triangle sides must be > 0, got {sides}")
    slack = 1.0 + TRIANGLE_TOLERANCE
    if x > (y + z) * slack or y > (x + z) * slack or z > (x + y) * slack:
        raise DegenerateTriangle(f"triangle inequality violated: {sides}")
    cos_theta = (y * y + z * z - x * x) / (2.0 * y * z)
    return math.acos(min(1.0, max(-1.0, cos_theta)))


def arc_drop(R: float, D: float) -> float:
    """Vertical drop Yd of a circular arc of radius R after horizontal distance D."""
    if not (R > 0) or not math.isfinite(R):
        raise OutOfDomain(f"arc radius must be > 0, got {R!r}")
    if not (0 <= D <= R):
        raise OutOfDomain(f"horizontal distance must lie in [0, R], got D={D!r}, R={R!r}")
    # R - sqrt(R^2 - D^2), rearranged to avoid cancellation for small D
    return D * D / (R + math.sqrt(R * R - D * D))


def signed_distance(line: OrientedLine2, p: Point2) -> float:
    """Positive on the left of the line direction, negative on the right."""
    u = line.direction
    dx = p.x - line.origin.x
    dy = p.y - line.origin.y
    return u.x * dy - u.y * dx


def segment_distance(a: Point2, b: Point2, p: Point2) -> float:
    ex, ey = b.x - a.x, b.y - a.y
    length_sq = ex * ex + ey * ey
    if length_sq == 0.0:
        return distance(a, p)
    t = ((p.x - a.x) * ex + (p.y - a.y) * ey) / length_sq
    t = min(1.0, max(0.0, t))
    return math.hypot(p.x - (a.x + t * ex), p.y - (a.y + t * ey))


def stadium_contains(ring: StadiumShape, p: Point2) -> bool:
    # closed set: the boundary counts as inside
    return segment_distance(ring.focus_a, ring.focus_b, p) <= ring.radius
