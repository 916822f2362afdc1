"""Run the decision pipeline over an existing sample log."""

from __future__ import annotations

from contextlib import contextmanager
from typing import Iterator, Optional

from aware_ground.errors import IoFailure, LayoutMismatch
from aware_ground.ground import layout_hash
from aware_ground.output import print_result, summary_stream
from aware_ground.pipeline import input_records, run_pipeline
from aware_ground.store import LogHeader, MatchLog, Sink, default_sinks, read_log


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("decide", parents=parents, help="Decide every delivery in a log")
    parser.add_argument("--log", required=True, help="Input match log (NDJSON)")
    parser.add_argument("--report", help="Also write every decision to this NDJSON file")
    parser.set_defaults(func=run)


@contextmanager
def open_sinks(report_path: Optional[str]) -> Iterator[list[Sink]]:
    """Umpire and scoreboard sinks, plus a report file sink when a path is given."""
    if not report_path:
        yield default_sinks()
        return
    try:
        fh = open(report_path, "w", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(report_path, exc.strerror or str(exc)) from None
    with fh:
        yield default_sinks(fh)


def run(args, config) -> int:
    layout = config["layout"]
    header, records = read_log(args.log)
    expected = layout_hash(layout)
    if header is not None and header.layout_hash != expected:
        raise LayoutMismatch(f"{args.log}: recorded with layout {header.layout_hash}, current layout is {expected}")

    sample_hz = header.sample_hz if header is not None else 100.0
    out_header = LogHeader(expected, sample_hz, config["rule"])
    with MatchLog.create(config["out"], out_header) as log, open_sinks(args.report) as sinks:
        summary = run_pipeline(layout, config["rule"], input_records(records), sinks, log)

    print_result(summary.as_dict(), json_mode=args.json, stream=summary_stream(config["out"]))
    return 0
