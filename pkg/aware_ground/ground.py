"""Dimensional model of the instrumented ground.

Coordinate convention: origin at the pitch centre, +x toward the striker's
end for deliveries from the north end, +y to that bowler's left, +z up.
Every physical constant used elsewhere comes from a GroundLayout.
"""

from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass, replace
from typing import Optional

from aware_ground.errors import GeometryError, InvalidLayout, ParseError
from aware_ground.geometry import (
    OrientedLine2,
    Point2,
    StadiumShape,
    distance,
    signed_distance,
)
from aware_ground.parsing import format_point, parse_float, parse_point, read_document

# Laws of Cricket dimensions, metres
PITCH_LENGTH = 20.12
POPPING_CREASE_OFFSET = 1.22
STUMP_ZONE_WIDTH = 0.2286
STUMP_ZONE_HEIGHT = 0.711
BALL_RADIUS = 0.036
RING_RADIUS = 27.43
BOUNDARY_RADIUS = 70.0

MIN_ANCHOR_SEPARATION = 1.0
ANCHOR_TOLERANCE = 1e-9


class End(str, enum.Enum):
    """Bowling end. North bowls toward +x, south toward -x."""

    NORTH = "north"
    SOUTH = "south"

    @property
    def sign(self) -> float:
        return 1.0 if self is End.NORTH else -1.0


@dataclass(frozen=True)
class GroundLayout:
    pitch_length: float
    popping_crease_offset: float
    stump_zone_width: float
    stump_zone_height: float
    ball_radius: float
    ring: StadiumShape
    boundary_radius: float
    access_points: tuple[tuple[str, Point2], ...]

    def access_point(self, ap_id: str) -> Optional[Point2]:
        for name, pos in self.access_points:
            if name == ap_id:
                return pos
        return None


@dataclass(frozen=True)
class CreaseFrame:
    crease_line: OrientedLine2
    anchor_a: Point2
    anchor_b: Point2
    end: End = End.NORTH


@dataclass(frozen=True)
class StumpZone:
    plane_x: float
    center_y: float
    half_width: float
    top_z: float


_LENGTH_FIELDS = (
    "pitch_length",
    "popping_crease_offset",
    "stump_zone_width",
    "stump_zone_height",
    "ball_radius",
    "boundary_radius",
)


def default_layout() -> GroundLayout:
    half = PITCH_LENGTH / 2
    corner = BOUNDARY_RADIUS
    return GroundLayout(
        pitch_length=PITCH_LENGTH,
        popping_crease_offset=POPPING_CREASE_OFFSET,
        stump_zone_width=STUMP_ZONE_WIDTH,
        stump_zone_height=STUMP_ZONE_HEIGHT,
        ball_radius=BALL_RADIUS,
        ring=StadiumShape(Point2(-half, 0.0), Point2(half, 0.0), RING_RADIUS),
        boundary_radius=BOUNDARY_RADIUS,
        access_points=(
            ("ap1", Point2(-corner, -corner)),
            ("ap2", Point2(corner, -corner)),
            ("ap3", Point2(corner, corner)),
            ("ap4", Point2(-corner, corner)),
        ),
    )


def validate_layout(layout: GroundLayout) -> GroundLayout:
    """Raise InvalidLayout naming the first violated field."""
    for name in _LENGTH_FIELDS:
        value = getattr(layout, name)
        if not (math.isfinite(value) and value > 0):
            raise InvalidLayout(name, f"must be > 0, got {value!r}")
    if not (layout.ring.radius > 0):
        raise InvalidLayout("ring_radius", "must be > 0")
    if not layout.popping_crease_offset < layout.pitch_length / 2:
        raise InvalidLayout("popping_crease_offset", "must be less than half the pitch length")

    aps = layout.access_points
    if len(aps) < 3:
        raise InvalidLayout("access_points", f"need at least 3, got {len(aps)}")
    ids = [name for name, _ in aps]
    if len(set(ids)) != len(ids):
        raise InvalidLayout("access_points", "duplicate access point ids")
    for i in range(len(aps)):
        for j in range(i + 1, len(aps)):
            if distance(aps[i][1], aps[j][1]) <= MIN_ANCHOR_SEPARATION:
                raise InvalidLayout(
                    "access_points", f"{aps[i][0]} and {aps[j][0]} are within {MIN_ANCHOR_SEPARATION} m"
                )
    if _collinear([p for _, p in aps]):
        raise InvalidLayout("access_points", "access points are collinear")
    return layout


def _collinear(points: list[Point2]) -> bool:
    base = points[0]
    far = max(points, key=lambda p: distance(base, p))
    try:
        line = OrientedLine2.through(base, far)
    except GeometryError:
        return True
    return all(abs(signed_distance(line, p)) <= MIN_ANCHOR_SEPARATION for p in points)


# -- Config documents -----------------------------------------------------------

def load_layout(config_text: str, path: Optional[str] = None) -> GroundLayout:
    """Build a layout from a `key = value` document; unspecified keys keep defaults."""
    layout = default_layout()
    fields: dict = {}
    ring_radius = layout.ring.radius
    focus_a, focus_b = layout.ring.focus_a, layout.ring.focus_b
    access_points: list[tuple[str, Point2]] = []

    for key, value, line in read_document(config_text, path):
        try:
            if key in _LENGTH_FIELDS:
                fields[key] = parse_float(value)
            elif key == "ring_radius":
                ring_radius = parse_float(value)
            elif key == "ring_focus_a":
                focus_a = Point2(*parse_point(value, 2))
            elif key == "ring_focus_b":
                focus_b = Point2(*parse_point(value, 2))
            elif key.startswith("ap.") and len(key) > 3:
                access_points.append((key[3:], Point2(*parse_point(value, 2))))
            else:
                raise ParseError(f"unknown key {key!r}", line, path)
        except ValueError as exc:
            raise ParseError(f"{key}: {exc}", line, path) from None

    if not (ring_radius > 0):
        raise InvalidLayout("ring_radius", f"must be > 0, got {ring_radius!r}")
    layout = replace(layout, ring=StadiumShape(focus_a, focus_b, ring_radius), **fields)
    if access_points:
        layout = replace(layout, access_points=tuple(access_points))
    return validate_layout(layout)


def dump_layout(layout: GroundLayout) -> str:
    """Serialise a layout so that load_layout(dump_layout(l)) == l."""
    lines = [f"{name} = {getattr(layout, name)!r}" for name in _LENGTH_FIELDS]
    lines.append(f"ring_radius = {layout.ring.radius!r}")
    lines.append(f"ring_focus_a = {format_point((layout.ring.focus_a.x, layout.ring.focus_a.y))}")
    lines.append(f"ring_focus_b = {format_point((layout.ring.focus_b.x, layout.ring.focus_b.y))}")
    for name, pos in layout.access_points:
        lines.append(f"ap.{name} = {format_point((pos.x, pos.y))}")
    return "\n".join(lines) + "\n"


def layout_hash(layout: GroundLayout) -> str:
    return hashlib.sha256(dump_layout(layout).encode("utf-8")).hexdigest()[:16]


# -- Frames ---------------------------------------------------------------------

def crease_frame(layout: GroundLayout, end: End = End.NORTH) -> CreaseFrame:
    """Fixed crease sensors for a bowling end.

    Sensor A sits where the popping crease meets the pitch centreline;
    sensor B sits on the stump line directly behind it, so the angle at A
    exceeds 90 degrees exactly when the foot is beyond the crease.
    """
    end = End(end)
    s = end.sign
    stump_x = -s * layout.pitch_length / 2
    anchor_b = Point2(stump_x, 0.0)
    anchor_a = Point2(stump_x + s * layout.popping_crease_offset, 0.0)
    # left of (0, -s) is +s*x, i.e. toward the striker
    line = OrientedLine2(anchor_a, Point2(0.0, -s))
    return CreaseFrame(crease_line=line, anchor_a=anchor_a, anchor_b=anchor_b, end=end)


def stump_zone(layout: GroundLayout, end: End = End.NORTH) -> StumpZone:
    """The striker's stumps for deliveries from `end`, widened by the ball radius."""
    end = End(end)
    return StumpZone(
        plane_x=end.sign * layout.pitch_length / 2,
        center_y=0.0,
        half_width=layout.stump_zone_width / 2 + layout.ball_radius,
        top_z=layout.stump_zone_height + layout.ball_radius,
    )
