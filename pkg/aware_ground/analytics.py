"""Post-hoc game analysis: bowling speed, strike rate and power, fielding coverage.

Speeds are m/s throughout; conversion to km/h happens only when reports are
printed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from aware_ground.decisions import DecisionEvent, DecisionKind, bounce_split
from aware_ground.errors import InsufficientSamples, InvalidSpec, NoBallsFaced, OutOfOrder
from aware_ground.geometry import Point2, distance3
from aware_ground.ground import End, GroundLayout, stump_zone
from aware_ground.positioning import SensorKind, SensorSample, Track, ingest_sample, position_at
from aware_ground.records import Annotation, AnnotationKind

STRIKE_WINDOW = 0.05
RESAMPLE_PERIOD = 0.1
MIN_CELL_SIZE = 0.5
MAX_CELL_SIZE = 10.0
KMH_PER_MS = 3.6

# Pitching distance from the striker's stumps, metres: (upper bound, band)
LENGTH_BANDS = (
    (2.0, "yorker"),
    (6.0, "full"),
    (8.0, "good"),
    (math.inf, "short"),
)


def to_kmh(speed: float) -> float:
    return speed * KMH_PER_MS


@dataclass(frozen=True)
class BattingRecord:
    player_id: str
    runs: int
    balls_faced: int

    def __post_init__(self) -> None:
        if self.runs < 0 or self.balls_faced < 0:
            raise ValueError(f"{self.player_id}: runs and balls faced must be >= 0")


@dataclass(frozen=True)
class CoverageGrid:
    cell_size: float
    origin: Point2
    cells: np.ndarray

    def total_occupancy(self) -> float:
        return float(self.cells.sum())

    def occupied_cells(self) -> set[tuple[int, int]]:
        """Lattice indices (relative to the ground origin) of cells with any occupancy."""
        i0 = int(round(self.origin.x / self.cell_size))
        j0 = int(round(self.origin.y / self.cell_size))
        return {(i0 + int(i), j0 + int(j)) for i, j in zip(*np.nonzero(self.cells))}


@dataclass(frozen=True)
class PlayerCoverage:
    distance_covered: float
    grid: CoverageGrid


@dataclass(frozen=True)
class BowlingSummary:
    release_speed: float
    pitch_point: Optional[Point2]
    pitch_t: Optional[float]
    length: Optional[str]


def ball_speed(track: Track, window: tuple[float, float]) -> float:
    """Path length over elapsed time for the samples inside window."""
    samples = track.window(*window)
    if len(samples) < 2:
        raise InsufficientSamples(f"{track.sensor_id}: need >= 2 samples in window, have {len(samples)}")
    path = sum(distance3(a.pos, b.pos) for a, b in zip(samples, samples[1:]))
    return path / (samples[-1].t - samples[0].t)


def strike_rate(rec: BattingRecord) -> float:
    """Runs per hundred balls."""
    if rec.balls_faced == 0:
        raise NoBallsFaced(f"{rec.player_id} has faced no balls")
    return rec.runs / rec.balls_faced * 100


def strike_power(track: Track, bat_contact_t: float) -> float:
    """Mean off-bat ball speed over the first 50 ms after contact."""
    return ball_speed(track, (bat_contact_t, bat_contact_t + STRIKE_WINDOW))


def _coverage(track: Track, cell_size: float) -> PlayerCoverage:
    empty = CoverageGrid(cell_size, Point2(0.0, 0.0), np.zeros((0, 0)))
    if len(track) < 2:
        return PlayerCoverage(0.0, empty)

    samples = track.samples
    covered = sum(distance3(a.pos, b.pos) for a, b in zip(samples, samples[1:]))

    t0, t1 = track.times[0], track.times[-1]
    steps = int(math.floor((t1 - t0) / RESAMPLE_PERIOD + 1e-9))
    times = [min(t1, t0 + k * RESAMPLE_PERIOD) for k in range(steps + 1)]
    weights = [max(0.0, min(RESAMPLE_PERIOD, t1 - t)) for t in times]
    xy = np.array([(p.x, p.y) for p in (position_at(track, t) for t in times)], dtype=float)

    origin = np.floor(xy.min(axis=0) / cell_size) * cell_size
    idx = np.floor((xy - origin) / cell_size).astype(int)
    shape = idx.max(axis=0) + 1
    cells = np.zeros(tuple(shape), dtype=float)
    np.add.at(cells, (idx[:, 0], idx[:, 1]), np.array(weights))
    return PlayerCoverage(covered, CoverageGrid(cell_size, Point2(float(origin[0]), float(origin[1])), cells))


def fielder_coverage(tracks: Iterable[Track], cell_size: float) -> dict[str, PlayerCoverage]:
    """Distance covered and time spent per grid cell, keyed by player id."""
    if not (MIN_CELL_SIZE <= cell_size <= MAX_CELL_SIZE):
        raise InvalidSpec("cell_size", f"must lie in [{MIN_CELL_SIZE}, {MAX_CELL_SIZE}], got {cell_size!r}")
    return {track.sensor_id: _coverage(track, cell_size) for track in sorted(tracks, key=lambda t: t.sensor_id)}


def length_band(layout: GroundLayout, end: End, pitch_point: Point2) -> str:
    from_stumps = abs(stump_zone(layout, end).plane_x - pitch_point.x)
    for bound, name in LENGTH_BANDS:
        if from_stumps < bound:
            return name
    return LENGTH_BANDS[-1][1]


def bowling_summary(track: Track, layout: GroundLayout, end: End = End.NORTH) -> BowlingSummary:
    """Release speed over the first bounce-free window and where the ball pitched."""
    windows = bounce_split(track, layout.ball_radius)
    first = windows[0]
    speed = ball_speed(track, first)
    if len(windows) == 1:
        return BowlingSummary(speed, None, None, None)
    # the pitching sample sits between the first two windows
    between = [s for s in track.window(first[1], windows[1][0]) if first[1] < s.t < windows[1][0]]
    pitch = min(between, key=lambda s: s.pos.z)
    point = pitch.pos.xy
    return BowlingSummary(speed, point, pitch.t, length_band(layout, End(end), point))


def batting_records(slices: Iterable[list], events: Iterable[DecisionEvent]) -> dict[str, BattingRecord]:
    """Runs and balls faced per striker. A no-ball is not a ball faced."""
    no_balls = {
        e.delivery_id for e in events
        if DecisionKind(e.kind) is DecisionKind.NO_BALL and e.verdict == "no_ball"
    }
    totals: dict[str, list[int]] = {}
    for records in slices:
        striker, delivery_id, runs = None, None, 0
        for rec in records:
            if not isinstance(rec, Annotation):
                continue
            if rec.kind is AnnotationKind.DELIVERY_START:
                striker = rec.fields.get("striker")
                delivery_id = rec.delivery_id
            else:
                runs = int(rec.fields.get("runs", 0))
        if striker is None:
            continue
        entry = totals.setdefault(striker, [0, 0])
        entry[0] += runs
        if delivery_id not in no_balls:
            entry[1] += 1
    return {pid: BattingRecord(pid, r, b) for pid, (r, b) in sorted(totals.items())}


def tracks_of_kind(samples: Iterable[SensorSample], kind: SensorKind) -> list[Track]:
    """Group samples of one kind into per-sensor tracks, skipping repeats in time."""
    grouped: dict[str, Track] = {}
    for s in samples:
        if s.kind is not kind:
            continue
        track = grouped.setdefault(s.sensor_id, Track(s.sensor_id))
        try:
            ingest_sample(track, s)
        except OutOfOrder:
            continue
    return [grouped[k] for k in sorted(grouped)]
