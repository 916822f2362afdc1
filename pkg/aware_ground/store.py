"""Append-only NDJSON match log and the decision sinks.

One record per line, UTF-8. The first line is the header; every later line
is a sensor sample, an annotation, a decision or a decision error. Floats
are written in shortest round-trip form so a log re-read and re-written is
byte-identical.
"""

from __future__ import annotations

import enum
import functools
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from typing import IO, Any, Optional

from aware_ground.decisions import DecisionEvent, DecisionFailure, DecisionKind, FieldingRule
from aware_ground.errors import CorruptRecord, IoFailure, OutOfOrder, VersionMismatch
from aware_ground.geometry import Point3
from aware_ground.positioning import SensorKind, SensorSample
from aware_ground.records import Annotation, AnnotationKind

logger = logging.getLogger(__name__)

LOG_FORMAT = "aware-ground/1"
DECISION_ERROR = "decision_error"

_SAMPLE_KINDS = {k.value: k for k in SensorKind}
_ANNOTATION_KINDS = {k.value: k for k in AnnotationKind}
_DECISION_KINDS = {k.value: k for k in DecisionKind}


_ENCODER = json.JSONEncoder(separators=(",", ":"), allow_nan=False)


def _dumps(obj: Any) -> str:
    return _ENCODER.encode(obj)


@functools.lru_cache(maxsize=4096)
def _quoted(text: str) -> str:
    return _ENCODER.encode(text)


@dataclass(frozen=True)
class LogHeader:
    layout_hash: str
    sample_hz: float
    rule: Optional[FieldingRule] = None
    format: str = LOG_FORMAT

    def encode(self) -> str:
        obj: dict[str, Any] = {
            "format": self.format,
            "layout_hash": self.layout_hash,
            "sample_hz": float(self.sample_hz),
        }
        if self.rule is not None:
            obj["rule"] = {"active_overs": list(self.rule.active_overs), "max_outside": self.rule.max_outside}
        return _dumps(obj)


# -- Encoding -----------------------------------------------------------------

def encode_record(record) -> str:
    """One log line (without the newline) for any record type."""
    if isinstance(record, SensorSample):
        p = record.pos
        return (
            f'{{"t":{float(record.t)!r},"id":{_quoted(record.sensor_id)},"kind":"{record.kind.value}",'
            f'"x":{float(p.x)!r},"y":{float(p.y)!r},"z":{float(p.z)!r}}}'
        )
    if isinstance(record, Annotation):
        return _dumps({"t": float(record.t), "kind": record.kind.value, **record.fields})
    if isinstance(record, DecisionEvent):
        return _dumps({
            "t": float(record.t),
            "kind": DecisionKind(record.kind).value,
            "verdict": record.verdict,
            "measurements": record.measurements,
            "delivery_id": record.delivery_id,
            "sinks": list(record.sinks_notified),
        })
    if isinstance(record, DecisionFailure):
        return _dumps({
            "t": float(record.t),
            "kind": DECISION_ERROR,
            "aborted": DecisionKind(record.kind).value,
            "error": record.error,
            "delivery_id": record.delivery_id,
        })
    raise TypeError(f"cannot encode {type(record).__name__}")


def decode_record(obj: dict):
    """Inverse of encode_record. Raises KeyError/ValueError on malformed input."""
    kind = obj["kind"]
    t = float(obj["t"])
    if kind in _SAMPLE_KINDS:
        pos = Point3(float(obj["x"]), float(obj["y"]), float(obj["z"]))
        return SensorSample(t, str(obj["id"]), _SAMPLE_KINDS[kind], pos)
    if kind in _ANNOTATION_KINDS:
        fields = {k: v for k, v in obj.items() if k not in ("t", "kind")}
        return Annotation(t, _ANNOTATION_KINDS[kind], fields)
    if kind in _DECISION_KINDS:
        return DecisionEvent(
            t, _DECISION_KINDS[kind], str(obj["verdict"]), dict(obj["measurements"]),
            obj.get("delivery_id"), list(obj.get("sinks", [])),
        )
    if kind == DECISION_ERROR:
        return DecisionFailure(t, _DECISION_KINDS[obj["aborted"]], str(obj["error"]), obj.get("delivery_id"))
    raise ValueError(f"unknown record kind {kind!r}")


# -- Writing ------------------------------------------------------------------

class MatchLog:
    """Single-writer append-only log. Each record is flushed as it is written."""

    def __init__(self, stream: IO[str], header: LogHeader, path: Optional[str] = None):
        self.stream = stream
        self.header = header
        self.path = path or getattr(stream, "name", "<stream>")
        self.last_t: Optional[float] = None
        self.count = 0
        self._owned = False
        self._write(header.encode())

    @classmethod
    def create(cls, path: str, header: LogHeader) -> MatchLog:
        """Open path for writing ('-' is standard output) and write the header."""
        if path == "-":
            return cls(sys.stdout, header, path="<stdout>")
        try:
            stream = open(path, "w", encoding="utf-8", newline="\n")
        except OSError as exc:
            raise IoFailure(path, exc.strerror or str(exc)) from None
        log = cls(stream, header, path=path)
        log._owned = True
        return log

    def _write(self, line: str) -> None:
        try:
            self.stream.write(line + "\n")
            self.stream.flush()
        except OSError as exc:
            raise IoFailure(self.path, exc.strerror or str(exc)) from None

    def append(self, record) -> MatchLog:
        if self.last_t is not None and record.t < self.last_t:
            raise OutOfOrder(f"{self.path}: record t={record.t!r} before last t={self.last_t!r}")
        self._write(encode_record(record))
        self.last_t = record.t
        self.count += 1
        return self

    def close(self) -> None:
        if self._owned:
            self.stream.close()

    def __enter__(self) -> MatchLog:
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def append(log: MatchLog, record) -> MatchLog:
    return log.append(record)


# -- Reading ------------------------------------------------------------------

def _parse_header(obj: dict, line: int, path: str) -> LogHeader:
    fmt = obj.get("format")
    if fmt is None:
        raise CorruptRecord("first line is not a log header", line, 0, path)
    if fmt != LOG_FORMAT:
        raise VersionMismatch(f"{path}: log format {fmt!r}, expected {LOG_FORMAT!r}")
    try:
        rule = None
        if "rule" in obj:
            first, last = obj["rule"]["active_overs"]
            rule = FieldingRule((int(first), int(last)), int(obj["rule"]["max_outside"]))
        return LogHeader(str(obj["layout_hash"]), float(obj["sample_hz"]), rule)
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptRecord(f"bad header: {exc}", line, 0, path) from None


def parse_log(data: bytes, path: str = "<log>") -> tuple[Optional[LogHeader], list]:
    """Parse log bytes into (header, records). An empty log has no header."""
    header = None
    records: list = []
    last_t = -math.inf
    offset = 0
    line_no = 0
    for raw in data.splitlines(keepends=True):
        line_no += 1
        start = offset
        offset += len(raw)
        if not raw.endswith(b"\n"):
            raise CorruptRecord("truncated line (no newline)", line_no, start, path)
        try:
            obj = json.loads(raw.decode("utf-8"))
            if not isinstance(obj, dict):
                raise ValueError("record is not an object")
        except (UnicodeDecodeError, ValueError) as exc:
            raise CorruptRecord(f"invalid JSON: {exc}", line_no, start, path) from None
        if header is None:
            header = _parse_header(obj, line_no, path)
            continue
        try:
            record = decode_record(obj)
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptRecord(f"bad record: {exc}", line_no, start, path) from None
        if record.t < last_t:
            raise CorruptRecord(f"timestamp {record.t!r} goes backwards", line_no, start, path)
        last_t = record.t
        records.append(record)
    return header, records


def read_log(path: str) -> tuple[Optional[LogHeader], list]:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise IoFailure(path, exc.strerror or str(exc)) from None
    return parse_log(data, path)


# -- Sinks --------------------------------------------------------------------

class SinkKind(str, enum.Enum):
    UMPIRE_ALERT = "umpire_alert"
    SCOREBOARD = "scoreboard"
    REPORT_FILE = "report_file"


_ADVERSE = {"no_ball", "violation", "hitting"}


@dataclass
class Sink:
    identifier: str
    kind: SinkKind
    received: list[DecisionEvent] = field(default_factory=list)

    def notify(self, event: DecisionEvent) -> None:
        self.received.append(event)


@dataclass
class UmpireAlertSink(Sink):
    """Raises an alarm for every adverse verdict."""

    kind: SinkKind = SinkKind.UMPIRE_ALERT

    def notify(self, event: DecisionEvent) -> None:
        super().notify(event)
        if event.verdict in _ADVERSE:
            logger.warning(
                "ALERT %s: %s at t=%.3f (delivery %s)",
                DecisionKind(event.kind).value, event.verdict, event.t, event.delivery_id,
            )


@dataclass
class ScoreboardSink(Sink):
    """Tallies verdicts per decision kind."""

    kind: SinkKind = SinkKind.SCOREBOARD
    tally: dict[str, dict[str, int]] = field(default_factory=dict)

    def notify(self, event: DecisionEvent) -> None:
        super().notify(event)
        per_kind = self.tally.setdefault(DecisionKind(event.kind).value, {})
        per_kind[event.verdict] = per_kind.get(event.verdict, 0) + 1


@dataclass
class ReportFileSink(Sink):
    """Writes each event as an NDJSON line to a stream."""

    kind: SinkKind = SinkKind.REPORT_FILE
    stream: Optional[IO[str]] = None

    def notify(self, event: DecisionEvent) -> None:
        super().notify(event)
        if self.stream is not None:
            self.stream.write(encode_record(event) + "\n")
            self.stream.flush()


def default_sinks(report_stream: Optional[IO[str]] = None) -> list[Sink]:
    sinks: list[Sink] = [UmpireAlertSink("umpire"), ScoreboardSink("scoreboard")]
    if report_stream is not None:
        sinks.append(ReportFileSink("report", stream=report_stream))
    return sinks
