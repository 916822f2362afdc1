"""Sensor samples, per-sensor tracks and range-based trilateration."""

from __future__ import annotations

import bisect
import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from aware_ground.errors import (
    DegenerateGeometry,
    InsufficientAnchors,
    InvalidRangeSet,
    NoConvergence,
    OutOfOrder,
    OutOfRange,
)
from aware_ground.geometry import Point2, Point3
from aware_ground.ground import GroundLayout

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 100
STEP_TOLERANCE = 1e-9
# Smallest/largest singular value ratio below which anchors count as collinear
COLLINEAR_RATIO = 1e-6
MAX_HALVINGS = 40


class SensorKind(str, enum.Enum):
    BALL = "ball"
    BOWLER_FOOT = "bowler_foot"
    PLAYER = "player"


@dataclass(frozen=True)
class SensorSample:
    t: float
    sensor_id: str
    kind: SensorKind
    pos: Point3

    def __post_init__(self) -> None:
        if not (math.isfinite(self.t) and self.t >= 0):
            raise ValueError(f"sample time must be finite and >= 0, got {self.t!r}")


@dataclass(frozen=True)
class RangeSet:
    t: float
    sensor_id: str
    ranges: tuple[tuple[str, float], ...]


@dataclass
class Track:
    """Time-ordered samples of one sensor. Single writer, any number of readers."""

    sensor_id: str
    samples: list[SensorSample] = field(default_factory=list)
    times: list[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def kind(self):
        return self.samples[0].kind if self.samples else None

    def window(self, t_start: float, t_end: float) -> list[SensorSample]:
        lo = bisect.bisect_left(self.times, t_start)
        hi = bisect.bisect_right(self.times, t_end)
        return self.samples[lo:hi]


def track_from(samples, sensor_id: str | None = None) -> Track:
    """Build a track by ingesting samples in order."""
    samples = list(samples)
    if sensor_id is None:
        sensor_id = samples[0].sensor_id if samples else ""
    track = Track(sensor_id)
    for s in samples:
        ingest_sample(track, s)
    return track


def ingest_sample(track: Track, s: SensorSample) -> Track:
    """Append s if it is strictly later than the last sample."""
    if s.sensor_id != track.sensor_id:
        raise ValueError(f"sample for {s.sensor_id!r} offered to track {track.sensor_id!r}")
    if track.times and s.t <= track.times[-1]:
        raise OutOfOrder(f"{s.sensor_id}: t={s.t!r} not after last t={track.times[-1]!r}")
    track.samples.append(s)
    track.times.append(s.t)
    return track


def position_at(track: Track, t: float) -> Point3:
    """Linear interpolation between bracketing samples; never extrapolates."""
    times = track.times
    if len(times) < 2:
        raise OutOfRange(f"{track.sensor_id}: need at least 2 samples, have {len(times)}")
    if t < times[0] or t > times[-1]:
        raise OutOfRange(f"{track.sensor_id}: t={t!r} outside [{times[0]!r}, {times[-1]!r}]")
    i = bisect.bisect_left(times, t)
    if times[i] == t:
        return track.samples[i].pos
    p0, p1 = track.samples[i - 1].pos, track.samples[i].pos
    w = (t - times[i - 1]) / (times[i] - times[i - 1])
    return Point3(
        p0.x + w * (p1.x - p0.x),
        p0.y + w * (p1.y - p0.y),
        p0.z + w * (p1.z - p0.z),
    )


# -- Trilateration --------------------------------------------------------------

def _anchors_for(layout: GroundLayout, rs: RangeSet) -> tuple[np.ndarray, np.ndarray]:
    if len(rs.ranges) < 3:
        raise InsufficientAnchors(f"{rs.sensor_id}: need >= 3 ranges, got {len(rs.ranges)}")
    ids = [ap_id for ap_id, _ in rs.ranges]
    if len(set(ids)) != len(ids):
        raise InvalidRangeSet(f"{rs.sensor_id}: duplicate access point ids")
    # sorted so the result does not depend on the order ranges arrived in
    ordered = sorted(rs.ranges)
    anchors, ranges = [], []
    for ap_id, rng in ordered:
        pos = layout.access_point(ap_id)
        if pos is None:
            raise InvalidRangeSet(f"{rs.sensor_id}: unknown access point {ap_id!r}")
        if not (math.isfinite(rng) and rng > 0):
            raise InvalidRangeSet(f"{rs.sensor_id}: range to {ap_id} must be > 0, got {rng!r}")
        anchors.append((pos.x, pos.y))
        ranges.append(rng)
    return np.array(anchors, dtype=float), np.array(ranges, dtype=float)


def _cost(p: np.ndarray, anchors: np.ndarray, ranges: np.ndarray) -> float:
    r = np.linalg.norm(anchors - p, axis=1) - ranges
    return float(r @ r)


def trilaterate(layout: GroundLayout, rs: RangeSet) -> tuple[Point2, float]:
    """Least-squares position from access-point ranges.

    Damped Gauss-Newton from the anchor centroid: each step solves the
    linearised problem with lstsq, then halves until the cost stops rising.
    Converged when the applied step is shorter than STEP_TOLERANCE.
    Returns (position, rms range residual).
    """
    anchors, ranges = _anchors_for(layout, rs)

    centered = anchors - anchors.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] / sv[0] < COLLINEAR_RATIO:
        raise DegenerateGeometry(f"{rs.sensor_id}: access points are collinear")

    p = anchors.mean(axis=0)
    cost = _cost(p, anchors, ranges)
    for iteration in range(1, MAX_ITERATIONS + 1):
        diff = p - anchors
        dist = np.linalg.norm(diff, axis=1)
        dist = np.where(dist == 0.0, np.finfo(float).tiny, dist)
        jac = diff / dist[:, None]
        resid = dist - ranges
        step = np.linalg.lstsq(jac, -resid, rcond=None)[0]

        scale = 1.0
        candidate = p + step
        new_cost = _cost(candidate, anchors, ranges)
        for _ in range(MAX_HALVINGS):
            if new_cost <= cost:
                break
            scale /= 2
            candidate = p + scale * step
            new_cost = _cost(candidate, anchors, ranges)
        else:
            candidate, new_cost = p, cost

        applied = float(np.linalg.norm(candidate - p))
        p, cost = candidate, new_cost
        if applied < STEP_TOLERANCE:
            logger.debug("trilaterate %s converged in %d iterations", rs.sensor_id, iteration)
            rms = math.sqrt(cost / len(ranges))
            return Point2(float(p[0]), float(p[1])), rms

    raise NoConvergence(f"{rs.sensor_id}: no fix after {MAX_ITERATIONS} iterations")


def fix_sample(layout: GroundLayout, rs: RangeSet, kind: SensorKind, z: float = 0.0) -> tuple[SensorSample, float]:
    """Turn a range set into a positioned sample plus its residual."""
    pos, residual = trilaterate(layout, rs)
    return SensorSample(rs.t, rs.sensor_id, SensorKind(kind), Point3(pos.x, pos.y, z)), residual
