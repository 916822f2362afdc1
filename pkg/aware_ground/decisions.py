"""Umpiring decisions: no-ball, fielding restriction and LBW projection."""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional

import numpy as np

from aware_ground.errors import (
    DecisionError,
    DegenerateTriangle,
    EngineError,
    IllConditioned,
    InsufficientSamples,
    NeverReaches,
)
from aware_ground.geometry import (
    ArcGeometry,
    Point2,
    TriangleSides,
    angle_at_vertex,
    distance,
    stadium_contains,
)
from aware_ground.ground import (
    BALL_RADIUS,
    CreaseFrame,
    End,
    GroundLayout,
    StumpZone,
    crease_frame,
    stump_zone,
)
from aware_ground.positioning import SensorKind, SensorSample, Track, track_from
from aware_ground.records import Annotation, AnnotationKind

logger = logging.getLogger(__name__)

# Foot on the crease line (theta == 90 degrees) is legal.
ANGLE_TIE = 1e-12
ANCHOR_COINCIDENCE = 1e-9
MIN_FIT_SPREAD = 0.05
MIN_FIT_SAMPLES = 3
MIN_SPLIT_SAMPLES = 4


class DecisionKind(str, enum.Enum):
    NO_BALL = "no_ball"
    FIELDING = "fielding_violation"
    LBW = "lbw_projection"


@dataclass
class DecisionEvent:
    t: float
    kind: DecisionKind
    verdict: str
    measurements: dict[str, Any]
    delivery_id: Optional[str] = None
    sinks_notified: list[str] = field(default_factory=list)

    def comparable(self) -> dict:
        """Fields a replay must reproduce; sink bookkeeping is excluded."""
        return {
            "t": self.t,
            "kind": DecisionKind(self.kind).value,
            "verdict": self.verdict,
            "measurements": self.measurements,
            "delivery_id": self.delivery_id,
        }


@dataclass(frozen=True)
class DecisionFailure:
    """A decision that was aborted by a component error."""

    t: float
    kind: DecisionKind
    error: str
    delivery_id: Optional[str] = None

    @classmethod
    def from_error(cls, t: float, err: DecisionError, delivery_id: Optional[str]) -> DecisionFailure:
        return cls(t, DecisionKind(err.kind), f"{type(err.cause).__name__}: {err.cause}", delivery_id)


@dataclass(frozen=True)
class FieldingRule:
    active_overs: tuple[int, int] = (1, 15)
    max_outside: int = 2

    def __post_init__(self) -> None:
        first, last = self.active_overs
        if first < 1 or last < first:
            raise ValueError(f"active overs must be a non-empty range, got {self.active_overs}")
        if self.max_outside < 0:
            raise ValueError(f"max_outside must be >= 0, got {self.max_outside}")

    def active(self, over: int) -> bool:
        return self.active_overs[0] <= over <= self.active_overs[1]


@dataclass(frozen=True)
class TrajectoryFit:
    origin: Point2
    direction: Point2
    coefficients: tuple[float, float, float]
    lateral: tuple[float, float]
    window: tuple[float, float]
    n_samples: int
    rms_residual: float
    s_end: float

    def height(self, s: float) -> float:
        a, b, c = self.coefficients
        return a + b * s + c * s * s

    def offset(self, s: float) -> float:
        p, q = self.lateral
        return p + q * s


@dataclass
class DeliveryOutcome:
    events: list[DecisionEvent] = field(default_factory=list)
    failures: list[DecisionFailure] = field(default_factory=list)


def emit(event: DecisionEvent, sinks: Iterable) -> DecisionEvent:
    """Hand the event to every sink once, in registration order."""
    for sink in sinks:
        sink.notify(event)
        event.sinks_notified.append(sink.identifier)
    return event


# -- No-ball ------------------------------------------------------------------

def quick_reject(sides: TriangleSides) -> bool:
    """x < z means the foot is nearer the stump-line sensor than the crease sensor is."""
    return sides.x < sides.z


def detect_no_ball(frame: CreaseFrame, foot: SensorSample, sinks: Iterable = ()) -> DecisionEvent:
    if foot.kind is not SensorKind.BOWLER_FOOT:
        raise ValueError(f"expected a bowler_foot sample, got {foot.kind.value}")
    s = foot.pos.xy
    a, b = frame.anchor_a, frame.anchor_b
    x, y, z = distance(b, s), distance(a, s), distance(a, b)
    if x < ANCHOR_COINCIDENCE or y < ANCHOR_COINCIDENCE:
        raise DegenerateTriangle(f"foot at ({s.x!r}, {s.y!r}) coincides with a crease sensor")
    sides = TriangleSides(x, y, z)

    measurements: dict[str, Any] = {"x": x, "y": y, "z": z}
    if quick_reject(sides):
        measurements["quick_reject"] = True
        verdict = "legal"
    else:
        theta = angle_at_vertex(sides)
        measurements["theta"] = theta
        measurements["quick_reject"] = False
        verdict = "no_ball" if theta > math.pi / 2 + ANGLE_TIE else "legal"
    return emit(DecisionEvent(foot.t, DecisionKind.NO_BALL, verdict, measurements), sinks)


# -- Fielding restriction ----------------------------------------------------------

def check_fielding(
    layout: GroundLayout,
    rule: FieldingRule,
    players: list[SensorSample],
    over: int,
    t: float,
) -> DecisionEvent:
    inside: dict[str, bool] = {}
    for p in players:
        if p.kind is not SensorKind.PLAYER:
            raise ValueError(f"expected player samples, got {p.kind.value} for {p.sensor_id}")
        inside[p.sensor_id] = stadium_contains(layout.ring, p.pos.xy)
    count_outside = sum(1 for v in inside.values() if not v)
    active = rule.active(over)
    verdict = "violation" if active and count_outside > rule.max_outside else "compliant"
    measurements = {
        "count_inside": len(inside) - count_outside,
        "count_outside": count_outside,
        "max_outside": rule.max_outside,
        "over": over,
        "rule_active": active,
        "inside": dict(sorted(inside.items())),
    }
    return DecisionEvent(t, DecisionKind.FIELDING, verdict, measurements)


# -- LBW --------------------------------------------------------------------------

def bounce_split(track: Track, ball_radius: float = BALL_RADIUS) -> list[tuple[float, float]]:
    """Bounce-free (t_start, t_end) windows in time order.

    A sample splits the track when it is a local minimum of z below two ball
    radii and the central-difference vertical velocity turns from negative to
    positive across it. The split sample belongs to neither window.
    """
    if len(track) < MIN_SPLIT_SAMPLES:
        raise InsufficientSamples(f"{track.sensor_id}: need >= {MIN_SPLIT_SAMPLES} samples, have {len(track)}")
    return _split_windows(track, ball_radius)


def _split_windows(track: Track, radius: float) -> list[tuple[float, float]]:
    t = np.array(track.times, dtype=float)
    z = np.array([s.pos.z for s in track.samples], dtype=float)
    vz = np.gradient(z, t)

    splits = []
    for i in range(1, len(z) - 1):
        if z[i] < 2 * radius and z[i] <= z[i - 1] and z[i] <= z[i + 1] and vz[i - 1] < 0 < vz[i + 1]:
            splits.append(i)

    windows = []
    start = 0
    for i in splits:
        if i - 1 >= start:
            windows.append((track.times[start], track.times[i - 1]))
        start = i + 1
    if start <= len(z) - 1:
        windows.append((track.times[start], track.times[-1]))
    return windows


def fit_trajectory(track: Track, window: tuple[float, float]) -> TrajectoryFit:
    """Least-squares parabola in the vertical plane of travel plus a lateral drift line."""
    samples = track.window(*window)
    n = len(samples)
    if n < MIN_FIT_SAMPLES:
        raise InsufficientSamples(f"{track.sensor_id}: need >= {MIN_FIT_SAMPLES} samples in window, have {n}")

    xy = np.array([(s.pos.x, s.pos.y) for s in samples], dtype=float)
    zs = np.array([s.pos.z for s in samples], dtype=float)
    centered = xy - xy.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    u = vt[0]
    if np.dot(xy[-1] - xy[0], u) < 0:
        u = -u
    normal = np.array([-u[1], u[0]])

    rel = xy - xy[0]
    s = rel @ u
    lat = rel @ normal
    if float(s.max() - s.min()) < MIN_FIT_SPREAD:
        raise IllConditioned(f"{track.sensor_id}: horizontal spread below {MIN_FIT_SPREAD} m")

    quad = np.column_stack([np.ones(n), s, s * s])
    (a, b, c), *_ = np.linalg.lstsq(quad, zs, rcond=None)
    line = np.column_stack([np.ones(n), s])
    (p, q), *_ = np.linalg.lstsq(line, lat, rcond=None)

    rz = zs - quad @ np.array([a, b, c])
    rl = lat - line @ np.array([p, q])
    rms = math.sqrt(float(np.mean(rz * rz + rl * rl)))
    return TrajectoryFit(
        origin=Point2(float(xy[0, 0]), float(xy[0, 1])),
        direction=Point2(float(u[0]), float(u[1])),
        coefficients=(float(a), float(b), float(c)),
        lateral=(float(p), float(q)),
        window=(samples[0].t, samples[-1].t),
        n_samples=n,
        rms_residual=rms,
        s_end=float(s[-1]),
    )


def _osculating_radius(fit: TrajectoryFit, s: float) -> float:
    _, b, c = fit.coefficients
    if c == 0:
        return math.inf
    slope = b + 2 * c * s
    return (1 + slope * slope) ** 1.5 / abs(2 * c)


def project_to_stumps(fit: TrajectoryFit, zone: StumpZone, t: Optional[float] = None) -> DecisionEvent:
    """Carry the fitted path forward to the stump plane and judge the intercept."""
    ux, uy = fit.direction.x, fit.direction.y
    p, q = fit.lateral
    a, b, c = fit.coefficients
    advance = ux - q * uy
    if abs(advance) < 1e-12:
        raise NeverReaches("path runs parallel to the stump plane")
    s_star = (zone.plane_x - fit.origin.x + p * uy) / advance
    if s_star < fit.s_end:
        raise NeverReaches(f"stump plane lies behind the fitted window (s*={s_star!r})")
    z_star = fit.height(s_star)
    if z_star < 0 and c >= 0:
        raise NeverReaches("fitted arc reaches the ground without falling toward it")
    y_star = fit.origin.y + s_star * uy + fit.offset(s_star) * ux

    second_bounce = z_star < 0
    hitting = (
        not second_bounce
        and abs(y_star - zone.center_y) <= zone.half_width
        and z_star <= zone.top_z
    )
    measurements: dict[str, Any] = {
        "intercept": [zone.plane_x, y_star, z_star],
        "s_star": s_star,
        "coefficients": list(fit.coefficients),
        "lateral": list(fit.lateral),
        "window": list(fit.window),
        "n_samples": fit.n_samples,
        "rms_residual": fit.rms_residual,
        "second_bounce": second_bounce,
    }
    radius = _osculating_radius(fit, fit.s_end)
    remaining = s_star - fit.s_end
    if math.isfinite(radius) and remaining <= radius:
        arc = ArcGeometry.of(radius, remaining)
        measurements["osculating_radius"] = arc.R
        measurements["arc_drop"] = arc.Yd
    event_t = fit.window[1] if t is None else t
    return DecisionEvent(event_t, DecisionKind.LBW, "hitting" if hitting else "missing", measurements)


# -- Orchestration ------------------------------------------------------------------

@dataclass(frozen=True)
class DeliveryContext:
    """What a delivery_start annotation tells the decision engine."""

    delivery_id: Optional[str] = None
    over: int = 1
    end: End = End.NORTH
    start_t: float = 0.0
    bat_contact: bool = False

    @classmethod
    def from_annotation(cls, ann: Annotation) -> DeliveryContext:
        f = ann.fields
        return cls(
            delivery_id=f.get("delivery_id"),
            over=int(f.get("over", 1)),
            end=End(f.get("end", End.NORTH.value)),
            start_t=ann.t,
            bat_contact=f.get("bat_contact_t") is not None,
        )


def _attempt(kind: DecisionKind, t: float, ctx: DeliveryContext, outcome: DeliveryOutcome, fn, *args) -> None:
    try:
        event = fn(*args)
    except EngineError as exc:
        err = DecisionError(kind.value, exc)
        logger.info("delivery %s: %s", ctx.delivery_id, err)
        outcome.failures.append(DecisionFailure.from_error(t, err, ctx.delivery_id))
        return
    event.delivery_id = ctx.delivery_id
    outcome.events.append(event)


def latest_players(player_tracks: Iterable[Track], t_from: float, t_to: float) -> list[SensorSample]:
    """Most recent sample of each player within [t_from, t_to], ordered by id."""
    latest = []
    for track in player_tracks:
        window = track.window(t_from, t_to)
        if window:
            latest.append(window[-1])
    latest.sort(key=lambda s: s.sensor_id)
    return latest


def decide_at_foot(
    layout: GroundLayout,
    rule: FieldingRule,
    ctx: DeliveryContext,
    foot: SensorSample,
    players: list[SensorSample],
) -> DeliveryOutcome:
    outcome = DeliveryOutcome()
    frame = crease_frame(layout, ctx.end)
    _attempt(DecisionKind.NO_BALL, foot.t, ctx, outcome, detect_no_ball, frame, foot)
    _attempt(DecisionKind.FIELDING, foot.t, ctx, outcome, check_fielding, layout, rule, players, ctx.over, foot.t)
    return outcome


def _lbw(layout: GroundLayout, ctx: DeliveryContext, ball: Track, t_end: float) -> DecisionEvent:
    windows = bounce_split(ball, layout.ball_radius)
    fit = fit_trajectory(ball, windows[-1])
    return project_to_stumps(fit, stump_zone(layout, ctx.end), t=t_end)


def decide_at_end(
    layout: GroundLayout,
    rule: FieldingRule,
    ctx: DeliveryContext,
    t_end: float,
    ball: Track,
    foot_seen: bool,
    players: list[SensorSample],
) -> DeliveryOutcome:
    """Decisions due when a delivery closes: LBW and the missing-foot fallbacks."""
    outcome = DeliveryOutcome()
    if not foot_seen:
        err = DecisionError(DecisionKind.NO_BALL.value, InsufficientSamples("no bowler_foot sample in delivery"))
        logger.info("delivery %s: %s", ctx.delivery_id, err)
        outcome.failures.append(DecisionFailure.from_error(t_end, err, ctx.delivery_id))
        _attempt(DecisionKind.FIELDING, t_end, ctx, outcome, check_fielding, layout, rule, players, ctx.over, t_end)
    if not ctx.bat_contact:
        _attempt(DecisionKind.LBW, t_end, ctx, outcome, _lbw, layout, ctx, ball, t_end)
    return outcome


def decide_delivery(
    layout: GroundLayout,
    rule: FieldingRule,
    records: list,
    sinks: Iterable = (),
) -> DeliveryOutcome:
    """All decisions for one delivery's records, ordered by t.

    Without a delivery_start annotation the delivery defaults to over 1 from
    the north end. Component errors are returned as failures tagged with the
    decision they aborted; the remaining decisions are still made.
    """
    ctx = DeliveryContext()
    t_end = None
    by_sensor: dict[str, list[SensorSample]] = {}
    for rec in records:
        if isinstance(rec, Annotation):
            if rec.kind is AnnotationKind.DELIVERY_START:
                ctx = DeliveryContext.from_annotation(rec)
            else:
                t_end = rec.t
        elif isinstance(rec, SensorSample):
            by_sensor.setdefault(rec.sensor_id, []).append(rec)

    tracks = {sid: track_from(samples, sid) for sid, samples in by_sensor.items()}
    ball = Track("ball")
    foot = None
    player_tracks = []
    for sid in sorted(tracks):
        track = tracks[sid]
        if track.kind is SensorKind.BALL:
            ball = track
        elif track.kind is SensorKind.BOWLER_FOOT:
            foot = track.samples[0]
        else:
            player_tracks.append(track)
    if t_end is None:
        t_end = ball.times[-1] if len(ball) else ctx.start_t

    outcome = DeliveryOutcome()
    if foot is not None:
        players = latest_players(player_tracks, ctx.start_t, foot.t)
        part = decide_at_foot(layout, rule, ctx, foot, players)
        outcome.events.extend(part.events)
        outcome.failures.extend(part.failures)
    players = latest_players(player_tracks, ctx.start_t, t_end)
    part = decide_at_end(layout, rule, ctx, t_end, ball, foot is not None, players)
    outcome.events.extend(part.events)
    outcome.failures.extend(part.failures)

    outcome.events.sort(key=lambda e: e.t)
    for event in outcome.events:
        emit(event, sinks)
    return outcome
