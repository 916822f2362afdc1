"""Simulate deliveries from scenario files and write a decided match log."""

from __future__ import annotations

from aware_ground.config import read_text
from aware_ground.ground import layout_hash
from aware_ground.output import print_result, summary_stream
from aware_ground.pipeline import run_pipeline
from aware_ground.simulation import scenario_from_config, simulate_match
from aware_ground.store import LogHeader, MatchLog
from aware_ground.commands.decide import open_sinks


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("simulate", parents=parents, help="Simulate a match and decide it")
    parser.add_argument(
        "--scenario", action="append", required=True,
        help="Scenario file; repeat for consecutive deliveries",
    )
    parser.add_argument("--report", help="Also write every decision to this NDJSON file")
    parser.set_defaults(func=run)


def run(args, config) -> int:
    layout = config["layout"]
    scenarios = [scenario_from_config(read_text(path), path, layout) for path in args.scenario]
    _, records = simulate_match(layout, scenarios, seed=config["seed"], noise_sigma=config["noise"])

    header = LogHeader(layout_hash(layout), scenarios[0][0].sample_hz, config["rule"])
    with MatchLog.create(config["out"], header) as log, open_sinks(args.report) as sinks:
        summary = run_pipeline(layout, config["rule"], records, sinks, log)

    print_result(summary.as_dict(), json_mode=args.json, stream=summary_stream(config["out"]))
    return 0
