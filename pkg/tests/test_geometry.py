"""Tests for aware_ground.geometry."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aware_ground.errors import DegenerateTriangle, GeometryError, OutOfDomain
from aware_ground.geometry import (
    ArcGeometry,
    OrientedLine2,
    Point2,
    Point3,
    StadiumShape,
    TriangleSides,
    angle_at_vertex,
    arc_drop,
    distance,
    distance3,
    segment_distance,
    signed_distance,
    stadium_contains,
)

coords = st.floats(min_value=-100, max_value=100, allow_nan=False)


def test_distance_three_four_five():
    assert distance(Point2(0, 0), Point2(3, 4)) == 5.0


def test_distance3():
    assert distance3(Point3(0, 0, 0), Point3(2, 3, 6)) == 7.0


def test_point_rejects_nan():
    with pytest.raises(GeometryError):
        Point2(float("nan"), 0.0)


@given(coords, coords, coords, coords)
def test_distance_symmetric(ax, ay, bx, by):
    a, b = Point2(ax, ay), Point2(bx, by)
    assert distance(a, b) == distance(b, a)


def test_angle_right_triangle():
    assert angle_at_vertex(TriangleSides(5.0, 3.0, 4.0)) == pytest.approx(math.pi / 2, abs=1e-12)


def test_angle_equilateral():
    assert angle_at_vertex(TriangleSides(1.0, 1.0, 1.0)) == pytest.approx(math.pi / 3, abs=1e-12)


def test_angle_zero_side_degenerate():
    with pytest.raises(DegenerateTriangle):
        angle_at_vertex(TriangleSides(1.0, 0.0, 1.0))


def test_angle_triangle_inequality_violated():
    with pytest.raises(DegenerateTriangle):
        angle_at_vertex(TriangleSides(10.0, 1.0, 1.0))


def test_angle_degenerate_is_value_error():
    with pytest.raises(ValueError):
        angle_at_vertex(TriangleSides(-1.0, 1.0, 1.0))


def test_arc_drop_examples():
    assert arc_drop(10.0, 0.0) == 0.0
    assert arc_drop(10.0, 10.0) == pytest.approx(10.0)
    assert arc_drop(5.0, 3.0) == pytest.approx(1.0)


def test_arc_drop_out_of_domain():
    with pytest.raises(OutOfDomain):
        arc_drop(5.0, 6.0)
    with pytest.raises(OutOfDomain):
        arc_drop(0.0, 0.0)


def test_arc_drop_identity_seeded():
    """R^2 = D^2 + (R - Yd)^2 over many random arcs."""
    rng = np.random.default_rng(9)
    radii = rng.uniform(0.1, 1000.0, size=10_000)
    fractions = rng.uniform(0.0, 1.0, size=10_000)
    for R, f in zip(radii, fractions):
        R, D = float(R), float(R * f)
        yd = arc_drop(R, D)
        assert abs(D * D + (R - yd) ** 2 - R * R) <= 1e-12 * R * R


def test_signed_distance_left_positive():
    line = OrientedLine2(Point2(0, 0), Point2(1, 0))
    assert signed_distance(line, Point2(5, 2)) == 2.0
    assert signed_distance(line, Point2(5, -2)) == -2.0
    assert signed_distance(line.reversed(), Point2(5, 2)) == -2.0


def test_oriented_line_requires_unit_direction():
    with pytest.raises(GeometryError):
        OrientedLine2(Point2(0, 0), Point2(2, 0))


def test_line_through_two_points():
    line = OrientedLine2.through(Point2(1, 1), Point2(1, 5))
    assert line.direction == Point2(0.0, 1.0)


def test_segment_distance_endpoint_and_interior():
    a, b = Point2(0, 0), Point2(10, 0)
    assert segment_distance(a, b, Point2(5, 3)) == 3.0
    assert segment_distance(a, b, Point2(13, 4)) == 5.0


def test_stadium_boundary_inside():
    ring = StadiumShape(Point2(-10, 0), Point2(10, 0), 27.43)
    assert stadium_contains(ring, Point2(0, 27.43))
    assert stadium_contains(ring, Point2(0, 0))
    assert not stadium_contains(ring, Point2(0, 27.44))
    assert not stadium_contains(ring, Point2(40, 0))


def test_stadium_radius_positive():
    with pytest.raises(GeometryError):
        StadiumShape(Point2(0, 0), Point2(1, 0), 0.0)


def test_angle_collinear_is_pi():
    assert angle_at_vertex(TriangleSides(2.0, 1.0, 1.0)) == math.pi


def test_angle_flat_triangle_within_rounding():
    # the far side exceeds y + z by one ulp after the distances are rounded
    assert angle_at_vertex(TriangleSides(1.2200100000000003, 9.999999999621423e-06, 1.2200000000000006)) > 3.1


def test_distance_triangle_inequality_seeded():
    rng = np.random.default_rng(10)
    pts = rng.uniform(-1000, 1000, size=(10_000, 3, 2))
    for a, b, c in pts:
        a, b, c = Point2(*map(float, a)), Point2(*map(float, b)), Point2(*map(float, c))
        assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9


def test_law_of_cosines_matches_dot_product_seeded():
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 10_000:
        a, b, c = (Point2(*map(float, p)) for p in rng.uniform(-10, 10, size=(3, 2)))
        y, z, x = distance(a, b), distance(a, c), distance(b, c)
        if min(x, y, z) < 1.0:
            continue
        ux, uy = b.x - a.x, b.y - a.y
        vx, vy = c.x - a.x, c.y - a.y
        cross, dot = ux * vy - uy * vx, ux * vx + uy * vy
        if abs(cross) / (y * z) < 0.01:
            continue
        expected = math.atan2(abs(cross), dot)
        assert abs(angle_at_vertex(TriangleSides(x, y, z)) - expected) <= 1e-9
        checked += 1


@given(
    st.floats(min_value=0.1, max_value=1000.0),
    st.floats(min_value=0.0, max_value=1.0),
    st.floats(min_value=0.0, max_value=1.0),
)
def test_arc_drop_non_decreasing(R, f1, f2):
    lo, hi = sorted((f1, f2))
    assert arc_drop(R, R * lo) <= arc_drop(R, R * hi)


def test_arc_geometry_of():
    arc = ArcGeometry.of(5.0, 3.0)
    assert (arc.R, arc.D) == (5.0, 3.0)
    assert arc.Yd == pytest.approx(1.0)


@given(coords, coords, st.floats(min_value=0.0, max_value=2 * math.pi), coords, coords)
def test_signed_distance_flips_with_direction(ox, oy, angle, px, py):
    line = OrientedLine2(Point2(ox, oy), Point2(math.cos(angle), math.sin(angle)))
    p = Point2(px, py)
    assert signed_distance(line.reversed(), p) == -signed_distance(line, p)



def _rigid(p: Point2, c: float, s: float, dx: float, dy: float) -> Point2:
    return Point2(c * p.x - s * p.y + dx, s * p.x + c * p.y + dy)


def test_stadium_contains_rigid_motion_seeded():
    rng = np.random.default_rng(12)
    checked = 0
    while checked < 10_000:
        fa, fb, p = (Point2(*map(float, q)) for q in rng.uniform(-50, 50, size=(3, 2)))
        radius = float(rng.uniform(1.0, 40.0))
        ring = StadiumShape(fa, fb, radius)
        if abs(segment_distance(fa, fb, p) - radius) < 1e-6:
            continue
        angle = float(rng.uniform(0, 2 * math.pi))
        c, s = math.cos(angle), math.sin(angle)
        dx, dy = (float(v) for v in rng.uniform(-100, 100, 2))
        moved = StadiumShape(_rigid(fa, c, s, dx, dy), _rigid(fb, c, s, dx, dy), radius)
        assert stadium_contains(moved, _rigid(p, c, s, dx, dy)) == stadium_contains(ring, p)
        checked += 1
