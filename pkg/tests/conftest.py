"""Shared fixtures for aware-ground tests."""

from __future__ import annotations

import pytest

from aware_ground.geometry import Point2, Point3
from aware_ground.ground import End, crease_frame, default_layout
from aware_ground.positioning import SensorKind, SensorSample
from aware_ground.simulation import FieldingSpec, aim_delivery

RELEASE = Point3(-8.9, 0.0, 2.2)


@pytest.fixture
def layout():
    return default_layout()


@pytest.fixture
def north_frame(layout):
    return crease_frame(layout, End.NORTH)


def make_foot(x, y=0.0, t=0.0):
    return SensorSample(t, "bowler_foot", SensorKind.BOWLER_FOOT, Point3(x, y, 0.0))


def make_player(pid, x, y, t=0.0):
    return SensorSample(t, pid, SensorKind.PLAYER, Point3(x, y, 0.0))


def make_ball(t, x, y=0.0, z=1.0, sensor_id="ball"):
    return SensorSample(t, sensor_id, SensorKind.BALL, Point3(x, y, z))


def straight_delivery(from_stumps=4.0, speed=30.0, lateral=0.0, **fields):
    """North-end delivery pitching `from_stumps` metres short of the striker's stumps."""
    pitch = Point2(default_layout().pitch_length / 2 - from_stumps, lateral)
    return aim_delivery(RELEASE, speed, pitch, **fields)


def ring_fielding(over=3):
    """Nine fielders inside the ring."""
    return FieldingSpec(tuple((f"f{i}", Point2(-12.0 + 3.0 * i, 10.0)) for i in range(1, 10)), over)
