"""Tests for aware_ground.analytics."""

from __future__ import annotations

import math

import numpy as np
import pytest

from aware_ground.analytics import (
    BattingRecord,
    ball_speed,
    batting_records,
    bowling_summary,
    fielder_coverage,
    length_band,
    strike_power,
    strike_rate,
    to_kmh,
    tracks_of_kind,
)
from aware_ground.decisions import DecisionEvent, DecisionKind
from aware_ground.deliveries import split_deliveries
from aware_ground.errors import InsufficientSamples, InvalidSpec, NoBallsFaced
from aware_ground.geometry import Point2
from aware_ground.ground import End
from aware_ground.positioning import SensorKind, track_from
from aware_ground.simulation import BatContact, DeliverySpec, simulate_delivery, simulate_match
from conftest import RELEASE, make_ball, make_player, ring_fielding, straight_delivery


def _ball_track(samples):
    return track_from([s for s in samples if s.kind is SensorKind.BALL])


def _uniform(speed, n=20, dt=0.01, t0=0.0):
    return track_from([make_ball(t0 + dt * i, speed * dt * i) for i in range(n)])


def test_ball_speed_uniform():
    assert ball_speed(_uniform(20.0), (0.0, 1.0)) == pytest.approx(20.0, abs=1e-9)


def test_ball_speed_stationary():
    track = track_from([make_ball(0.01 * i, 3.0) for i in range(5)])
    assert ball_speed(track, (0.0, 1.0)) == 0.0


def test_ball_speed_needs_two_samples():
    with pytest.raises(InsufficientSamples):
        ball_speed(_uniform(20.0), (0.5, 1.0))


def test_ball_speed_time_translation():
    assert ball_speed(_uniform(20.0, t0=100.0), (100.0, 101.0)) == pytest.approx(
        ball_speed(_uniform(20.0), (0.0, 1.0)), abs=1e-9
    )


def test_ball_speed_rigid_motion():
    rng = np.random.default_rng(40)
    pts = rng.uniform(-5, 5, size=(15, 3))
    base = track_from([make_ball(0.01 * i, *map(float, p)) for i, p in enumerate(pts)])
    angle = 0.7
    c, s = math.cos(angle), math.sin(angle)
    moved = track_from([
        make_ball(0.01 * i, float(c * x - s * y + 12.0), float(s * x + c * y - 3.0), float(z))
        for i, (x, y, z) in enumerate(pts)
    ])
    assert ball_speed(moved, (0.0, 1.0)) == pytest.approx(ball_speed(base, (0.0, 1.0)), rel=1e-12)


def test_release_speed_against_truth_with_noise(layout):
    spec = straight_delivery(speed=38.9)
    for seed in range(100):
        truth, samples = simulate_delivery(layout, spec, seed=seed, noise_sigma=0.005)
        track = _ball_track(samples)
        window = (truth.release_t, truth.bounce_times[0])
        times = [s.t for s in track.window(*window)]
        assert ball_speed(track, window) == pytest.approx(truth.mean_speed(times), abs=0.6)


def test_to_kmh():
    assert to_kmh(38.9) == pytest.approx(140.04)


@pytest.mark.parametrize("runs, balls, rate", [(50, 40, 125.0), (0, 10, 0.0)])
def test_strike_rate(runs, balls, rate):
    assert strike_rate(BattingRecord("p", runs, balls)) == rate


def test_strike_rate_no_balls():
    with pytest.raises(NoBallsFaced):
        strike_rate(BattingRecord("p", 4, 0))
    with pytest.raises(ZeroDivisionError):
        strike_rate(BattingRecord("p", 4, 0))


def test_strike_rate_scaling():
    base = strike_rate(BattingRecord("p", 37, 29))
    assert strike_rate(BattingRecord("p", 74, 29)) == 2 * base
    assert strike_rate(BattingRecord("p", 37, 58)) == base / 2


def test_batting_record_rejects_negative():
    with pytest.raises(ValueError):
        BattingRecord("p", -1, 3)


def test_strike_power_matches_off_bat_speed(layout):
    contact = BatContact(0.6, (-20.0, 15.0, 0.0))
    truth, samples = simulate_delivery(layout, straight_delivery(bat_contact=contact))
    track = _ball_track(samples)
    times = [s.t for s in track.window(0.6, 0.6 + 0.05)]
    power = strike_power(track, 0.6)
    assert power == pytest.approx(truth.mean_speed(times), abs=1e-6)
    # gravity adds a few mm/s over the window
    assert power == pytest.approx(25.0, abs=0.01)


def test_strike_power_no_samples_after_contact():
    with pytest.raises(InsufficientSamples):
        strike_power(_uniform(20.0), 5.0)


def test_strike_power_continuity():
    track = _uniform(30.0, n=40)
    assert strike_power(track, 0.1) == ball_speed(track, (0.1, 0.15))


def test_stationary_player_coverage():
    track = track_from([make_player("f1", 3.2, 4.1, t=float(t)) for t in range(11)])
    cov = fielder_coverage([track], cell_size=5.0)["f1"]
    assert cov.distance_covered == 0.0
    assert len(cov.grid.occupied_cells()) == 1
    assert cov.grid.total_occupancy() == pytest.approx(10.0, abs=1e-9)


def test_straight_run_distance():
    track = track_from([make_player("f1", 5.0 * t, 0.0, t=float(t)) for t in range(21)])
    cov = fielder_coverage([track], cell_size=2.0)["f1"]
    assert cov.distance_covered == pytest.approx(100.0, abs=1e-6)
    assert cov.grid.total_occupancy() == pytest.approx(20.0, abs=0.1)


def test_disjoint_players_disjoint_cells():
    a = track_from([make_player("a", -30.0 + t, 0.0, t=float(t)) for t in range(10)])
    b = track_from([make_player("b", 30.0 + t, 20.0, t=float(t)) for t in range(10)])
    cov = fielder_coverage([b, a], cell_size=2.0)
    assert list(cov) == ["a", "b"]
    assert not cov["a"].grid.occupied_cells() & cov["b"].grid.occupied_cells()


def test_coverage_empty_track():
    cov = fielder_coverage([track_from([make_player("f1", 0.0, 0.0)])], cell_size=1.0)["f1"]
    assert cov.distance_covered == 0.0
    assert cov.grid.total_occupancy() == 0.0


@pytest.mark.parametrize("size", [0.1, 20.0])
def test_coverage_cell_size_bounds(size):
    with pytest.raises(InvalidSpec):
        fielder_coverage([], cell_size=size)


def test_coverage_occupancy_matches_duration():
    rng = np.random.default_rng(41)
    for _ in range(50):
        n = int(rng.integers(2, 40))
        times = np.cumsum(rng.uniform(0.05, 2.0, n))
        pts = rng.uniform(-40, 40, size=(n, 2))
        track = track_from([make_player("p", float(x), float(y), t=float(t)) for t, (x, y) in zip(times, pts)])
        grid = fielder_coverage([track], cell_size=3.0)["p"].grid
        duration = float(times[-1] - times[0])
        assert abs(grid.total_occupancy() - duration) <= 0.1 + 1e-9
        assert (grid.cells >= 0).all()


def test_distance_additive_over_split():
    rng = np.random.default_rng(42)
    pts = rng.uniform(-40, 40, size=(30, 2))
    samples = [make_player("p", float(x), float(y), t=float(i)) for i, (x, y) in enumerate(pts)]
    whole = fielder_coverage([track_from(samples)], 1.0)["p"].distance_covered
    head = fielder_coverage([track_from(samples[:12])], 1.0)["p"].distance_covered
    tail = fielder_coverage([track_from(samples[11:])], 1.0)["p"].distance_covered
    assert head + tail == pytest.approx(whole, abs=1e-9)


@pytest.mark.parametrize(
    "from_stumps, band",
    [(1.0, "yorker"), (4.0, "full"), (7.0, "good"), (9.0, "short")],
)
def test_length_band(layout, from_stumps, band):
    assert length_band(layout, End.NORTH, Point2(10.06 - from_stumps, 0.0)) == band
    assert length_band(layout, End.SOUTH, Point2(-10.06 + from_stumps, 0.0)) == band


def test_bowling_summary(layout):
    truth, samples = simulate_delivery(layout, straight_delivery(from_stumps=4.0))
    summary = bowling_summary(_ball_track(samples), layout)
    assert summary.length == "full"
    assert abs(summary.pitch_t - truth.bounce_times[0]) <= 0.01
    assert summary.pitch_point.x == pytest.approx(6.06, abs=0.3)
    assert summary.release_speed > 30.0


def test_bowling_summary_full_toss(layout):
    spec = DeliverySpec(release_pos=RELEASE, release_vel=(30.0, 0.0, 0.0))
    _, samples = simulate_delivery(layout, spec)
    summary = bowling_summary(_ball_track(samples), layout)
    assert summary.pitch_point is None
    assert summary.length is None


def test_batting_records_skip_no_balls(layout):
    scenarios = [
        (straight_delivery(delivery_id="d1", striker="opener", runs=4), ring_fielding()),
        (straight_delivery(delivery_id="d2", striker="opener", runs=1), ring_fielding()),
        (straight_delivery(delivery_id="d3", striker="other", runs=0), ring_fielding()),
    ]
    _, records = simulate_match(layout, scenarios)
    events = [DecisionEvent(1.0, DecisionKind.NO_BALL, "no_ball", {}, delivery_id="d2")]
    result = batting_records(split_deliveries(records), events)
    assert result == {
        "opener": BattingRecord("opener", 5, 1),
        "other": BattingRecord("other", 0, 1),
    }


def test_tracks_of_kind_skips_repeats():
    samples = [make_player("b", 0.0, 0.0, t=0.0), make_player("a", 1.0, 1.0, t=0.0), make_player("a", 2.0, 2.0, t=0.0)]
    tracks = tracks_of_kind(samples + [make_ball(0.0, 0.0)], SensorKind.PLAYER)
    assert [t.sensor_id for t in tracks] == ["a", "b"]
    assert len(tracks[0]) == 1
