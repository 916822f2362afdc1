"""Verify a decided log by recomputing its decisions."""

from __future__ import annotations

from aware_ground.errors import EXIT_DECISION
from aware_ground.output import print_error, print_result, summary_stream
from aware_ground.pipeline import replay
from aware_ground.store import LogHeader, MatchLog, default_sinks, read_log


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser(
        "replay", parents=parents,
        help="Recompute a log's decisions and report divergences",
    )
    parser.add_argument("--log", required=True, help="Decided match log (NDJSON)")
    parser.set_defaults(func=run)


def run(args, config) -> int:
    layout = config["layout"]
    header, _ = read_log(args.log)
    out = None
    if header is not None:
        rule = header.rule or config["rule"]
        out = MatchLog.create(config["out"], LogHeader(header.layout_hash, header.sample_hz, rule))
    try:
        result = replay(args.log, layout, default_sinks(), out=out, rule=config["rule"])
    finally:
        if out is not None:
            out.close()

    stream = summary_stream(config["out"])
    data = {
        "log": args.log,
        "records": len(result.records),
        "decisions": len(result.summary.outputs),
        "compared": result.compared,
        "divergences": len(result.divergences),
    }
    print_result(data, json_mode=args.json, stream=stream)
    if not args.json:
        print(f"{len(result.divergences)} divergences", file=stream)
    if result.divergences:
        for d in result.divergences:
            print_error(d, json_mode=args.json)
        return EXIT_DECISION
    return 0
