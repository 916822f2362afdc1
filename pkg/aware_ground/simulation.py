"""Data-generation tier: scripted deliveries and fielding snapshots.

Ball flight is piecewise ballistic under gravity with no drag. A bounce is
instantaneous: the vertical velocity flips and is scaled by the restitution
coefficient, and the first bounce may add a lateral kick to emulate spin.
Sensors are sampled at k / sample_hz after release with optional seeded
Gaussian noise on every axis.
"""

from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from aware_ground.errors import InvalidSpec, ParseError
from aware_ground.geometry import Point2, Point3
from aware_ground.ground import BALL_RADIUS, End, GroundLayout, StumpZone, stump_zone
from aware_ground.parsing import format_point, parse_float, parse_point, read_document
from aware_ground.positioning import SensorKind, SensorSample
from aware_ground.records import Annotation, AnnotationKind, record_key

logger = logging.getLogger(__name__)

GRAVITY = 9.81
DEFAULT_RESTITUTION = 0.7
DEFAULT_SAMPLE_HZ = 100.0
MIN_SAMPLE_HZ = 10.0
MAX_SAMPLE_HZ = 1000.0
DEFAULT_NOISE_SIGMA = 0.005
MIN_RELEASE_SPEED = 1.0
# post-bounce vertical speed below which the ball is treated as rolling to rest
REST_SPEED = 0.5
# seconds of flight still sampled after bat contact
FOLLOW_THROUGH = 0.5
MAX_FLIGHT = 5.0
# default foot landing distance behind the popping crease
FOOT_BEHIND_CREASE = 0.15
DELIVERY_GAP = 2.0
MAX_FIELDERS = 9

BALL_ID = "ball"
FOOT_ID = "bowler_foot"

Vec3 = tuple[float, float, float]


@dataclass(frozen=True)
class BatContact:
    t: float  # seconds after release
    new_vel: Vec3


@dataclass(frozen=True)
class DeliverySpec:
    release_pos: Point3
    release_vel: Vec3
    restitution: float = DEFAULT_RESTITUTION
    bat_contact: Optional[BatContact] = None
    foot_landing: Optional[Point2] = None
    spin_deviation: Optional[float] = None
    pad_contact_t: Optional[float] = None  # seconds after release
    end: End = End.NORTH
    delivery_id: str = "d1"
    striker: str = "striker"
    runs: int = 0
    start_t: float = 0.0
    sample_hz: float = DEFAULT_SAMPLE_HZ


@dataclass(frozen=True)
class FieldingSpec:
    placements: tuple[tuple[str, Point2], ...] = ()
    over_number: int = 1


@dataclass(frozen=True)
class FlightSegment:
    t0: float
    t1: float
    p0: Vec3
    v0: Vec3

    def position(self, t: float) -> Vec3:
        tau = t - self.t0
        x, y, z = self.p0
        vx, vy, vz = self.v0
        return (x + vx * tau, y + vy * tau, z + vz * tau - 0.5 * GRAVITY * tau * tau)

    def velocity(self, t: float) -> Vec3:
        vx, vy, vz = self.v0
        return (vx, vy, vz - GRAVITY * (t - self.t0))


@dataclass(frozen=True)
class ScenarioTruth:
    segments: tuple[FlightSegment, ...]
    bounce_times: tuple[float, ...]
    bounce_points: tuple[Point3, ...]
    release_t: float
    end_t: float
    end_reason: str
    stump_intercept: Optional[Point3]
    hits_stumps: Optional[bool]
    foot_position: Point2

    def segment_at(self, t: float) -> FlightSegment:
        starts = [s.t0 for s in self.segments]
        i = max(0, bisect.bisect_right(starts, t) - 1)
        return self.segments[i]

    def position(self, t: float) -> Point3:
        return Point3(*self.segment_at(t).position(t))

    def mean_speed(self, times) -> float:
        """Chord-sum speed of the true path through the given instants."""
        times = list(times)
        points = [self.position(t) for t in times]
        path = sum(
            math.sqrt((b.x - a.x) ** 2 + (b.y - a.y) ** 2 + (b.z - a.z) ** 2)
            for a, b in zip(points, points[1:])
        )
        return path / (times[-1] - times[0])


# -- Validation -----------------------------------------------------------------

def _finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


def validate_delivery(spec: DeliverySpec) -> DeliverySpec:
    vel = spec.release_vel
    if len(vel) != 3 or not _finite(*vel) or math.sqrt(sum(v * v for v in vel)) <= MIN_RELEASE_SPEED:
        raise InvalidSpec("release_vel", f"speed must exceed {MIN_RELEASE_SPEED} m/s")
    if not spec.release_pos.z > 0:
        raise InvalidSpec("release_pos", "release height must be > 0")
    if not (0 < spec.restitution <= 1):
        raise InvalidSpec("restitution", f"must lie in (0, 1], got {spec.restitution!r}")
    if not (MIN_SAMPLE_HZ <= spec.sample_hz <= MAX_SAMPLE_HZ):
        raise InvalidSpec("sample_hz", f"must lie in [{MIN_SAMPLE_HZ}, {MAX_SAMPLE_HZ}]")
    if spec.bat_contact is not None:
        if not (spec.bat_contact.t > 0) or len(spec.bat_contact.new_vel) != 3:
            raise InvalidSpec("bat_contact", "contact time must be > 0 with a 3D velocity")
    if spec.pad_contact_t is not None and not spec.pad_contact_t > 0:
        raise InvalidSpec("pad_contact_t", "must be > 0")
    if spec.spin_deviation is not None and not _finite(spec.spin_deviation):
        raise InvalidSpec("spin_deviation", "must be finite")
    if spec.runs < 0:
        raise InvalidSpec("runs", "must be >= 0")
    if not (math.isfinite(spec.start_t) and spec.start_t >= 0):
        raise InvalidSpec("start_t", "must be >= 0")
    return spec


def validate_fielding(spec: FieldingSpec) -> FieldingSpec:
    ids = [pid for pid, _ in spec.placements]
    if len(set(ids)) != len(ids):
        raise InvalidSpec("placements", "duplicate player ids")
    if len(ids) > MAX_FIELDERS:
        raise InvalidSpec("placements", f"at most {MAX_FIELDERS} fielders, got {len(ids)}")
    if BALL_ID in ids or FOOT_ID in ids:
        raise InvalidSpec("placements", f"player ids must not be {BALL_ID!r} or {FOOT_ID!r}")
    if spec.over_number < 1:
        raise InvalidSpec("over_number", "must be a positive integer")
    return spec


# -- Flight ---------------------------------------------------------------------

def _time_to_height(z0: float, vz: float, height: float) -> float:
    """Positive root of z0 + vz*t - g*t^2/2 = height."""
    disc = vz * vz + 2 * GRAVITY * (z0 - height)
    if disc < 0:
        return 0.0
    return max(0.0, (vz + math.sqrt(disc)) / GRAVITY)


_EVENT_PRIORITY = {
    "pad_contact": 0,
    "stump_plane": 1,
    "bat_contact": 2,
    "bounce": 3,
    "follow_through": 4,
    "timeout": 5,
}


def _fly(layout: GroundLayout, spec: DeliverySpec, zone: StumpZone):
    r = layout.ball_radius
    sign = spec.end.sign
    start = spec.start_t
    contact_t = start + spec.bat_contact.t if spec.bat_contact else None
    pad_t = start + spec.pad_contact_t if spec.pad_contact_t else None
    limit = start + MAX_FLIGHT

    t = start
    p = (spec.release_pos.x, spec.release_pos.y, spec.release_pos.z)
    v = tuple(float(c) for c in spec.release_vel)
    segments: list[FlightSegment] = []
    bounce_times: list[float] = []
    bounce_points: list[Point3] = []
    bat_done = False
    spun = False

    while True:
        events = [(t + _time_to_height(p[2], v[2], r), "bounce"), (limit, "timeout")]
        if bat_done:
            events.append((contact_t + FOLLOW_THROUGH, "follow_through"))
        else:
            if sign * v[0] > 0:
                tau = (zone.plane_x - p[0]) / v[0]
                if tau >= 0:
                    events.append((t + tau, "stump_plane"))
            if contact_t is not None and contact_t > t:
                events.append((contact_t, "bat_contact"))
            if pad_t is not None and pad_t > t:
                events.append((pad_t, "pad_contact"))
        t_next, what = min(events, key=lambda e: (e[0], _EVENT_PRIORITY[e[1]]))
        seg = FlightSegment(t, t_next, p, v)
        segments.append(seg)

        if what == "bounce":
            x, y, _ = seg.position(t_next)
            vx, vy, vz = seg.velocity(t_next)
            bounce_times.append(t_next)
            bounce_points.append(Point3(x, y, r))
            vz_post = spec.restitution * abs(vz)
            if vz_post < REST_SPEED:
                return segments, bounce_times, bounce_points, t_next, "rest"
            if not spun and spec.spin_deviation:
                vy += spec.spin_deviation
            spun = True
            t, p, v = t_next, (x, y, r), (vx, vy, vz_post)
        elif what == "bat_contact":
            p = seg.position(t_next)
            v = tuple(float(c) for c in spec.bat_contact.new_vel)
            t = t_next
            bat_done = True
        else:
            return segments, bounce_times, bounce_points, t_next, what


def _intercept(seg: FlightSegment, zone: StumpZone) -> Optional[Point3]:
    """Extend a segment's ballistic flight to the stump plane."""
    vx = seg.v0[0]
    if vx == 0:
        return None
    tau = (zone.plane_x - seg.p0[0]) / vx
    if tau < 0:
        return None
    x, y, z = seg.position(seg.t0 + tau)
    return Point3(zone.plane_x, y, z)


def _hits(point: Point3, zone: StumpZone) -> bool:
    return abs(point.y - zone.center_y) <= zone.half_width and 0 <= point.z <= zone.top_z


def default_foot_landing(layout: GroundLayout, end: End) -> Point2:
    s = End(end).sign
    crease_x = -s * layout.pitch_length / 2 + s * layout.popping_crease_offset
    return Point2(crease_x - s * FOOT_BEHIND_CREASE, 0.0)


def simulate_delivery(
    layout: GroundLayout,
    spec: DeliverySpec,
    sample_hz: Optional[float] = None,
    seed: int = 0,
    noise_sigma: float = 0.0,
) -> tuple[ScenarioTruth, list[SensorSample]]:
    """Ground truth plus ball and bowler-foot samples for one delivery."""
    if sample_hz is not None:
        spec = replace(spec, sample_hz=float(sample_hz))
    validate_delivery(spec)
    if not (math.isfinite(noise_sigma) and noise_sigma >= 0):
        raise InvalidSpec("noise_sigma", "must be >= 0")

    zone = stump_zone(layout, spec.end)
    segments, bounce_times, bounce_points, end_t, reason = _fly(layout, spec, zone)

    intercept = None
    if reason in ("stump_plane", "pad_contact"):
        intercept = _intercept(segments[-1], zone)
    foot = spec.foot_landing or default_foot_landing(layout, spec.end)
    truth = ScenarioTruth(
        segments=tuple(segments),
        bounce_times=tuple(bounce_times),
        bounce_points=tuple(bounce_points),
        release_t=spec.start_t,
        end_t=end_t,
        end_reason=reason,
        stump_intercept=intercept,
        hits_stumps=_hits(intercept, zone) if intercept is not None else None,
        foot_position=foot,
    )

    hz = spec.sample_hz
    count = int(math.floor((end_t - spec.start_t) * hz + 1e-9)) + 1
    times = [spec.start_t + k / hz for k in range(count)]
    rng = np.random.default_rng(seed)
    if noise_sigma > 0:
        ball_noise = rng.normal(0.0, noise_sigma, size=(count, 3))
        foot_noise = rng.normal(0.0, noise_sigma, size=2)
    else:
        ball_noise = np.zeros((count, 3))
        foot_noise = np.zeros(2)

    samples = []
    for k, t in enumerate(times):
        x, y, z = truth.segment_at(t).position(t)
        if noise_sigma > 0:
            x += float(ball_noise[k, 0])
            y += float(ball_noise[k, 1])
            z = max(0.0, z + float(ball_noise[k, 2]))
        samples.append(SensorSample(t, BALL_ID, SensorKind.BALL, Point3(x, y, z)))
    fx, fy = foot.x, foot.y
    if noise_sigma > 0:
        fx += float(foot_noise[0])
        fy += float(foot_noise[1])
    samples.append(SensorSample(spec.start_t, FOOT_ID, SensorKind.BOWLER_FOOT, Point3(fx, fy, 0.0)))
    samples.sort(key=record_key)
    logger.debug(
        "delivery %s: %d ball samples, %d bounces, ends by %s",
        spec.delivery_id, count, len(bounce_times), reason,
    )
    return truth, samples


def simulate_fielding(layout: GroundLayout, spec: FieldingSpec, t: float) -> list[SensorSample]:
    """Static snapshot of every fielder at time t (z = 0, no noise)."""
    validate_fielding(spec)
    return [
        SensorSample(t, pid, SensorKind.PLAYER, Point3(pos.x, pos.y, 0.0))
        for pid, pos in spec.placements
    ]


def aim_delivery(
    release_pos: Point3,
    speed: float,
    pitch_point: Point2,
    ball_radius: float = BALL_RADIUS,
    end: End = End.NORTH,
    **fields,
) -> DeliverySpec:
    """Solve the release velocity that pitches the ball at `pitch_point`.

    `speed` is the along-pitch speed in m/s.
    """
    end = End(end)
    if not speed > 0:
        raise InvalidSpec("speed", "must be > 0")
    flight = end.sign * (pitch_point.x - release_pos.x) / speed
    if not flight > 0:
        raise InvalidSpec("pitch_point", "must lie ahead of the release point")
    vx = end.sign * speed
    vy = (pitch_point.y - release_pos.y) / flight
    vz = (ball_radius - release_pos.z + 0.5 * GRAVITY * flight * flight) / flight
    return DeliverySpec(release_pos=release_pos, release_vel=(vx, vy, vz), end=end, **fields)


def simulate_match(
    layout: GroundLayout,
    scenarios: list[tuple[DeliverySpec, FieldingSpec]],
    seed: int = 0,
    noise_sigma: float = 0.0,
) -> tuple[list[ScenarioTruth], list]:
    """Consecutive deliveries with annotations and fielder snapshots, time-ordered."""
    truths: list[ScenarioTruth] = []
    records: list = []
    next_start = 0.0
    used_ids: set[str] = set()
    for k, (delivery, fielding) in enumerate(scenarios):
        delivery_id = delivery.delivery_id
        if delivery_id in used_ids:
            delivery_id = f"{delivery_id}.{k + 1}"
        used_ids.add(delivery_id)
        start = max(delivery.start_t, next_start)
        delivery = replace(delivery, start_t=start, delivery_id=delivery_id)

        truth, samples = simulate_delivery(layout, delivery, seed=seed + k, noise_sigma=noise_sigma)
        players = simulate_fielding(layout, fielding, start)
        last_ball_t = max(s.t for s in samples if s.kind is SensorKind.BALL)

        start_fields = {
            "delivery_id": delivery_id,
            "over": fielding.over_number,
            "end": delivery.end.value,
            "striker": delivery.striker,
        }
        if delivery.bat_contact is not None:
            start_fields["bat_contact_t"] = start + delivery.bat_contact.t
        records.append(Annotation(start, AnnotationKind.DELIVERY_START, start_fields))
        records.extend(samples)
        records.extend(players)
        records.append(
            Annotation(last_ball_t, AnnotationKind.DELIVERY_END, {"delivery_id": delivery_id, "runs": delivery.runs})
        )
        truths.append(truth)
        next_start = last_ball_t + DELIVERY_GAP

    records.sort(key=record_key)
    return truths, records


# -- Scenario documents -----------------------------------------------------------

def scenario_from_config(
    config_text: str,
    path: Optional[str] = None,
    layout: Optional[GroundLayout] = None,
) -> tuple[DeliverySpec, FieldingSpec]:
    """Parse a scenario document into fully populated specs."""
    ball_radius = layout.ball_radius if layout is not None else BALL_RADIUS
    values: dict = {}
    placements: list[tuple[str, Point2]] = []
    over = 1
    lines: dict[str, int] = {}

    for key, value, line in read_document(config_text, path):
        lines[key] = line
        try:
            if key in ("release_pos", "release_vel", "bat_contact_vel"):
                values[key] = parse_point(value, 3)
            elif key in ("foot_landing", "pitch_point"):
                values[key] = Point2(*parse_point(value, 2))
            elif key in ("restitution", "sample_hz", "spin_deviation", "bat_contact_t",
                         "pad_contact_t", "speed", "start_t"):
                values[key] = parse_float(value)
            elif key in ("runs", "over"):
                number = int(value)
                if key == "over":
                    over = number
                else:
                    values[key] = number
            elif key == "end":
                values[key] = End(value)
            elif key in ("delivery_id", "striker"):
                values[key] = value
            elif key.startswith("fielder.") and len(key) > 8:
                placements.append((key[8:], Point2(*parse_point(value, 2))))
            else:
                raise ParseError(f"unknown key {key!r}", line, path)
        except ValueError as exc:
            raise ParseError(f"{key}: {exc}", line, path) from None

    if "release_pos" not in values:
        raise InvalidSpec("release_pos", "required")
    release_pos = Point3(*values.pop("release_pos"))
    if release_pos.z <= 0:
        raise InvalidSpec("release_pos", "release height must be > 0")

    bat_t = values.pop("bat_contact_t", None)
    bat_vel = values.pop("bat_contact_vel", None)
    if (bat_t is None) != (bat_vel is None):
        raise InvalidSpec("bat_contact", "bat_contact_t and bat_contact_vel go together")
    common = {k: values[k] for k in (
        "restitution", "foot_landing", "spin_deviation", "pad_contact_t",
        "delivery_id", "striker", "runs", "start_t", "sample_hz",
    ) if k in values}
    if bat_t is not None:
        common["bat_contact"] = BatContact(bat_t, bat_vel)
    end = values.get("end", End.NORTH)

    if "release_vel" in values:
        if "pitch_point" in values or "speed" in values:
            raise InvalidSpec("release_vel", "give either release_vel or pitch_point + speed")
        delivery = DeliverySpec(release_pos=release_pos, release_vel=values["release_vel"], end=end, **common)
    elif "pitch_point" in values and "speed" in values:
        delivery = aim_delivery(release_pos, values["speed"], values["pitch_point"], ball_radius, end, **common)
    else:
        raise InvalidSpec("release_vel", "required (or pitch_point + speed)")

    fielding = FieldingSpec(tuple(placements), over)
    return validate_delivery(delivery), validate_fielding(fielding)


def dump_scenario(delivery: DeliverySpec, fielding: FieldingSpec) -> str:
    """Serialise specs so that scenario_from_config(dump_scenario(d, f)) == (d, f)."""
    p = delivery.release_pos
    lines = [
        f"release_pos = {format_point((p.x, p.y, p.z))}",
        f"release_vel = {format_point(delivery.release_vel)}",
        f"restitution = {delivery.restitution!r}",
        f"sample_hz = {delivery.sample_hz!r}",
        f"end = {delivery.end.value}",
        f"delivery_id = {delivery.delivery_id}",
        f"striker = {delivery.striker}",
        f"runs = {delivery.runs}",
        f"start_t = {delivery.start_t!r}",
        f"over = {fielding.over_number}",
    ]
    if delivery.foot_landing is not None:
        lines.append(f"foot_landing = {format_point((delivery.foot_landing.x, delivery.foot_landing.y))}")
    if delivery.spin_deviation is not None:
        lines.append(f"spin_deviation = {delivery.spin_deviation!r}")
    if delivery.pad_contact_t is not None:
        lines.append(f"pad_contact_t = {delivery.pad_contact_t!r}")
    if delivery.bat_contact is not None:
        lines.append(f"bat_contact_t = {delivery.bat_contact.t!r}")
        lines.append(f"bat_contact_vel = {format_point(delivery.bat_contact.new_vel)}")
    for pid, pos in fielding.placements:
        lines.append(f"fielder.{pid} = {format_point((pos.x, pos.y))}")
    return "\n".join(lines) + "\n"
