"""Tests for aware_ground.ground."""

from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest

from aware_ground.errors import InvalidLayout, ParseError
from aware_ground.geometry import Point2, StadiumShape, distance, signed_distance, stadium_contains
from aware_ground.ground import (
    End,
    crease_frame,
    default_layout,
    dump_layout,
    layout_hash,
    load_layout,
    stump_zone,
    validate_layout,
)


def test_default_constants(layout):
    assert layout.popping_crease_offset == 1.22
    assert layout.pitch_length == 20.12
    assert layout.ring.radius == 27.43
    assert len(layout.access_points) == 4


def test_default_layout_valid(layout):
    assert validate_layout(layout) is layout


def test_default_ring_contains_pitch_center(layout):
    assert stadium_contains(layout.ring, Point2(0.0, 0.0))


def test_load_empty_document_is_default():
    assert load_layout("") == default_layout()


def test_load_single_override():
    loaded = load_layout("ring_radius = 30.0\n")
    expected = replace(default_layout(), ring=replace(default_layout().ring, radius=30.0))
    assert loaded == expected


def test_load_negative_pitch_length():
    with pytest.raises(InvalidLayout) as exc:
        load_layout("pitch_length = -5\n")
    assert exc.value.field == "pitch_length"


def test_load_unknown_key_reports_line():
    with pytest.raises(ParseError) as exc:
        load_layout("# ground\nball_radius = 0.036\nwicket_colour = red\n", path="g.cfg")
    assert exc.value.line == 3
    assert "g.cfg:3" in str(exc.value)


def test_load_bad_number_reports_line():
    with pytest.raises(ParseError) as exc:
        load_layout("pitch_length = long\n")
    assert exc.value.line == 1


def test_load_duplicate_key():
    with pytest.raises(ParseError):
        load_layout("ball_radius = 0.03\nball_radius = 0.04\n")


def test_load_access_points_replace_defaults():
    layout = load_layout("ap.n = 0,60\nap.se = 50,-40\nap.sw = -50,-40\n")
    assert [name for name, _ in layout.access_points] == ["n", "se", "sw"]


def test_collinear_access_points_rejected():
    with pytest.raises(InvalidLayout) as exc:
        load_layout("ap.a = 0,0\nap.b = 10,0\nap.c = 20,0\n")
    assert exc.value.field == "access_points"


def test_close_access_points_rejected():
    with pytest.raises(InvalidLayout):
        load_layout("ap.a = 0,0\nap.b = 0.5,0\nap.c = 0,20\n")


def test_crease_offset_must_fit_in_half_pitch():
    with pytest.raises(InvalidLayout) as exc:
        load_layout("popping_crease_offset = 11\n")
    assert exc.value.field == "popping_crease_offset"


def test_dump_load_round_trip(layout):
    assert load_layout(dump_layout(layout)) == layout


def test_round_trip_random_layouts():
    rng = np.random.default_rng(4)
    for _ in range(1000):
        base = default_layout()
        ring = StadiumShape(base.ring.focus_a, base.ring.focus_b, float(rng.uniform(20, 40)))
        layout = replace(
            base,
            pitch_length=float(rng.uniform(18, 24)),
            popping_crease_offset=float(rng.uniform(0.5, 2.0)),
            ball_radius=float(rng.uniform(0.02, 0.05)),
            ring=ring,
        )
        loaded = load_layout(dump_layout(layout))
        assert loaded == layout
        assert validate_layout(loaded) is loaded


def test_layout_hash_stable_and_sensitive(layout):
    assert layout_hash(layout) == layout_hash(default_layout())
    assert layout_hash(layout) != layout_hash(replace(layout, ball_radius=0.035))
    assert len(layout_hash(layout)) == 16


def test_crease_frame_anchor_spacing(north_frame):
    assert distance(north_frame.anchor_a, north_frame.anchor_b) == pytest.approx(1.22, abs=1e-12)


def test_crease_frame_signs(north_frame):
    line = north_frame.crease_line
    assert abs(signed_distance(line, north_frame.anchor_a)) <= 1e-9
    assert signed_distance(line, north_frame.anchor_b) == pytest.approx(-1.22, abs=1e-12)


@pytest.mark.parametrize("end", [End.NORTH, End.SOUTH])
def test_crease_frame_invariants_both_ends(layout, end):
    frame = crease_frame(layout, end)
    assert abs(signed_distance(frame.crease_line, frame.anchor_a)) <= 1e-9
    assert signed_distance(frame.crease_line, frame.anchor_b) < 0
    assert distance(frame.anchor_a, frame.anchor_b) > 0.1
    # the striker's stumps are on the positive side
    assert signed_distance(frame.crease_line, Point2(0.0, 0.0)) > 0


def test_crease_frames_symmetric_under_half_turn(layout):
    north = crease_frame(layout, End.NORTH)
    south = crease_frame(layout, End.SOUTH)
    for a, b in ((north.anchor_a, south.anchor_a), (north.anchor_b, south.anchor_b)):
        assert a.x == pytest.approx(-b.x, abs=1e-9)
        assert a.y == pytest.approx(-b.y, abs=1e-9)


def test_stump_zone_margins(layout):
    zone = stump_zone(layout, End.NORTH)
    assert zone.plane_x == pytest.approx(10.06)
    assert zone.half_width == pytest.approx(0.2286 / 2 + 0.036)
    assert zone.top_z == pytest.approx(0.711 + 0.036)
    assert stump_zone(layout, End.SOUTH).plane_x == pytest.approx(-10.06)
