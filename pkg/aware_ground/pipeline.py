"""Gather, communicate, process and present: the live decision pipeline.

The gather stage reads the source and groups records that share a
timestamp. Complete groups travel over a bounded asyncio queue to the
process stage, which appends them to the match log, updates the per-sensor
tracks, runs whatever decisions became due and notifies the sinks.
"""

from __future__ import annotations

import asyncio
import io
import logging
from dataclasses import dataclass, field
from typing import Any, AsyncIterable, Iterable, Optional, Union

from aware_ground.config import run_async
from aware_ground.decisions import (
    DecisionEvent,
    DecisionFailure,
    DecisionKind,
    DeliveryContext,
    DeliveryOutcome,
    FieldingRule,
    decide_at_end,
    decide_at_foot,
    emit,
    latest_players,
)
from aware_ground.errors import LayoutMismatch, OutOfOrder
from aware_ground.ground import GroundLayout, layout_hash
from aware_ground.positioning import SensorKind, SensorSample, Track, ingest_sample, track_from
from aware_ground.records import Annotation, AnnotationKind, record_key
from aware_ground.simulation import DEFAULT_SAMPLE_HZ
from aware_ground.store import LogHeader, MatchLog, read_log

logger = logging.getLogger(__name__)

QUEUE_SIZE = 64
BATCH_GROUPS = 256

Source = Union[Iterable, AsyncIterable]


@dataclass(frozen=True)
class DeadLetter:
    record: Any
    reason: str


@dataclass
class PipelineSummary:
    records: int = 0
    samples: int = 0
    annotations: int = 0
    decisions: dict[str, int] = field(default_factory=dict)
    errors: dict[str, int] = field(default_factory=dict)
    dead_letters: list[DeadLetter] = field(default_factory=list)
    events: list[DecisionEvent] = field(default_factory=list)
    failures: list[DecisionFailure] = field(default_factory=list)
    # events and failures in the order they were written
    outputs: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "records": self.records,
            "samples": self.samples,
            "annotations": self.annotations,
            "decisions": sum(self.decisions.values()),
            **{f"decisions.{k}": v for k, v in sorted(self.decisions.items())},
            "decision_errors": sum(self.errors.values()),
            **{f"errors.{k}": v for k, v in sorted(self.errors.items())},
            "dead_letters": len(self.dead_letters),
        }


class _Processor:
    """Process stage state: tracks, the open delivery and the log."""

    def __init__(self, layout: GroundLayout, rule: FieldingRule, sinks: list, log: MatchLog, summary: PipelineSummary):
        self.layout = layout
        self.rule = rule
        self.sinks = sinks
        self.log = log
        self.summary = summary
        self.tracks: dict[str, Track] = {}
        self.ctx: Optional[DeliveryContext] = None
        self.foot_seen = False

    def dead_letter(self, record, reason: str) -> None:
        logger.info("dead letter at t=%r: %s", getattr(record, "t", None), reason)
        self.summary.dead_letters.append(DeadLetter(record, reason))

    def _accept_sample(self, s: SensorSample) -> bool:
        track = self.tracks.get(s.sensor_id)
        if track is None:
            track = self.tracks[s.sensor_id] = Track(s.sensor_id)
        elif track.kind is not None and track.kind is not s.kind:
            self.dead_letter(s, f"{s.sensor_id} changed kind from {track.kind.value} to {s.kind.value}")
            return False
        try:
            ingest_sample(track, s)
        except OutOfOrder as exc:
            self.dead_letter(s, str(exc))
            return False
        self.log.append(s)
        self.summary.records += 1
        self.summary.samples += 1
        return True

    def _tracks_of(self, kind: SensorKind) -> list[Track]:
        return [self.tracks[k] for k in sorted(self.tracks) if self.tracks[k].kind is kind]

    def process(self, group: list) -> None:
        foot: Optional[SensorSample] = None
        end: Optional[Annotation] = None
        for rec in group:
            if isinstance(rec, SensorSample):
                if self._accept_sample(rec) and rec.kind is SensorKind.BOWLER_FOOT and foot is None:
                    foot = rec
            elif isinstance(rec, Annotation):
                self.log.append(rec)
                self.summary.records += 1
                self.summary.annotations += 1
                if rec.kind is AnnotationKind.DELIVERY_START:
                    self.ctx = DeliveryContext.from_annotation(rec)
                    self.foot_seen = False
                else:
                    end = rec
            else:
                self.dead_letter(rec, f"{type(rec).__name__} is not an input record")

        ctx = self.ctx
        if ctx is None:
            return
        if foot is not None and not self.foot_seen:
            self.foot_seen = True
            players = latest_players(self._tracks_of(SensorKind.PLAYER), ctx.start_t, foot.t)
            self._publish(decide_at_foot(self.layout, self.rule, ctx, foot, players))
        if end is not None:
            balls = self._tracks_of(SensorKind.BALL)
            ball = track_from(balls[0].window(ctx.start_t, end.t), balls[0].sensor_id) if balls else Track("ball")
            players = latest_players(self._tracks_of(SensorKind.PLAYER), ctx.start_t, end.t)
            self._publish(decide_at_end(self.layout, self.rule, ctx, end.t, ball, self.foot_seen, players))
            self.ctx = None

    def _publish(self, outcome: DeliveryOutcome) -> None:
        for event in outcome.events:
            emit(event, self.sinks)
            self.log.append(event)
            kind = DecisionKind(event.kind).value
            self.summary.decisions[kind] = self.summary.decisions.get(kind, 0) + 1
            self.summary.events.append(event)
            self.summary.outputs.append(event)
            self.summary.records += 1
        for failure in outcome.failures:
            self.log.append(failure)
            kind = DecisionKind(failure.kind).value
            self.summary.errors[kind] = self.summary.errors.get(kind, 0) + 1
            self.summary.failures.append(failure)
            self.summary.outputs.append(failure)
            self.summary.records += 1


class _Grouper:
    """Groups records by timestamp; returns a batch once BATCH_GROUPS groups are complete."""

    def __init__(self, summary: PipelineSummary):
        self.summary = summary
        self.batch: list[list] = []
        self.group: list = []
        self.group_t = None

    def offer(self, rec) -> Optional[list[list]]:
        t = getattr(rec, "t", None)
        group_t = self.group_t
        if group_t is not None and t != group_t:
            if t < group_t:
                logger.info("dead letter at t=%r: arrived after t=%r", t, group_t)
                self.summary.dead_letters.append(DeadLetter(rec, f"late record: t={t!r} after t={group_t!r}"))
                return None
            self.group.sort(key=record_key)
            self.batch.append(self.group)
            self.group = [rec]
            self.group_t = t
            if len(self.batch) >= BATCH_GROUPS:
                full, self.batch = self.batch, []
                return full
            return None
        self.group_t = t
        self.group.append(rec)
        return None

    def finish(self) -> list[list]:
        if self.group:
            self.group.sort(key=record_key)
            self.batch.append(self.group)
            self.group = []
        full, self.batch = self.batch, []
        return full


async def _gather(source: Source, queue: asyncio.Queue, summary: PipelineSummary) -> None:
    """Group records by timestamp and forward complete groups in batches."""
    grouper = _Grouper(summary)
    if hasattr(source, "__aiter__"):
        async for rec in source:
            full = grouper.offer(rec)
            if full:
                await queue.put(full)
    else:
        for rec in source:
            full = grouper.offer(rec)
            if full:
                await queue.put(full)
    rest = grouper.finish()
    if rest:
        await queue.put(rest)
    await queue.put(None)


async def _process(queue: asyncio.Queue, processor: _Processor) -> None:
    while True:
        batch = await queue.get()
        if batch is None:
            return
        for group in batch:
            processor.process(group)


def default_log(layout: GroundLayout, rule: FieldingRule, sample_hz: float = DEFAULT_SAMPLE_HZ) -> MatchLog:
    return MatchLog(io.StringIO(), LogHeader(layout_hash(layout), sample_hz, rule))


async def run_pipeline_async(
    layout: GroundLayout,
    rule: FieldingRule,
    source: Source,
    sinks: Iterable = (),
    log: Optional[MatchLog] = None,
) -> PipelineSummary:
    """Run every stage to completion and return the summary."""
    if log is None:
        log = default_log(layout, rule)
    summary = PipelineSummary()
    processor = _Processor(layout, rule, list(sinks), log, summary)
    queue: asyncio.Queue = asyncio.Queue(maxsize=QUEUE_SIZE)
    await asyncio.gather(_gather(source, queue, summary), _process(queue, processor))
    logger.debug(
        "pipeline: %d records, %d decisions, %d dead letters",
        summary.records, len(summary.events), len(summary.dead_letters),
    )
    return summary


def run_pipeline(
    layout: GroundLayout,
    rule: FieldingRule,
    source: Source,
    sinks: Iterable = (),
    log: Optional[MatchLog] = None,
) -> PipelineSummary:
    return run_async(run_pipeline_async(layout, rule, source, sinks, log))


# -- Replay -------------------------------------------------------------------

@dataclass
class ReplayResult:
    header: Optional[LogHeader]
    records: list
    summary: PipelineSummary
    compared: bool
    divergences: list[str]


def input_records(records: list) -> list:
    """Samples and annotations: what the pipeline consumes."""
    return [r for r in records if isinstance(r, (SensorSample, Annotation))]


def _comparable_outputs(records: list) -> list:
    out = []
    for r in records:
        if isinstance(r, DecisionEvent):
            out.append(("event", r.comparable()))
        elif isinstance(r, DecisionFailure):
            out.append(("error", r))
    return out


def _diverge(stored: list, recomputed: list) -> list[str]:
    problems = []
    for i, (a, b) in enumerate(zip(stored, recomputed)):
        if a != b:
            problems.append(f"decision {i + 1}: stored {a[1]!r} != recomputed {b[1]!r}")
    if len(stored) != len(recomputed):
        problems.append(f"stored {len(stored)} decisions, recomputed {len(recomputed)}")
    return problems


def replay(
    log_path: str,
    layout: GroundLayout,
    sinks: Iterable = (),
    out: Optional[MatchLog] = None,
    rule: Optional[FieldingRule] = None,
) -> ReplayResult:
    """Re-feed a stored log through the pipeline and compare decisions.

    Decisions are compared only when the log header records the fielding
    rule they were made under. Sink bookkeeping is not compared.
    """
    header, records = read_log(log_path)
    if header is None:
        return ReplayResult(None, [], PipelineSummary(), False, [])
    if header.layout_hash != layout_hash(layout):
        raise LayoutMismatch(
            f"{log_path}: recorded with layout {header.layout_hash}, current layout is {layout_hash(layout)}"
        )
    effective = header.rule or rule or FieldingRule()
    if out is None:
        out = MatchLog(io.StringIO(), LogHeader(header.layout_hash, header.sample_hz, effective))
    summary = run_pipeline(layout, effective, input_records(records), sinks, out)

    compared = header.rule is not None
    divergences = []
    if compared:
        divergences = _diverge(_comparable_outputs(records), _comparable_outputs(summary.outputs))
    for d in divergences:
        logger.warning("replay divergence: %s", d)
    return ReplayResult(header, records, summary, compared, divergences)
