"""Bowling, batting and fielding reports from a match log."""

from __future__ import annotations

import asyncio
import logging
import sys

from aware_ground.analytics import (
    MAX_CELL_SIZE,
    MIN_CELL_SIZE,
    batting_records,
    bowling_summary,
    fielder_coverage,
    strike_power,
    strike_rate,
    to_kmh,
    tracks_of_kind,
)
from aware_ground.config import run_async
from aware_ground.deliveries import apply_latest, decisions_in, select_deliveries, split_deliveries
from aware_ground.errors import EngineError, InvalidSpec, IoFailure
from aware_ground.ground import End
from aware_ground.output import print_result, summary_stream, write_ndjson
from aware_ground.positioning import SensorKind, SensorSample
from aware_ground.records import Annotation, AnnotationKind
from aware_ground.store import read_log

logger = logging.getLogger(__name__)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("analyze", parents=parents, help="Write analytics reports for a log")
    parser.add_argument("--log", required=True, help="Match log (NDJSON)")
    parser.add_argument(
        "--cell-size", type=float, default=5.0,
        help=f"Coverage grid cell size in metres, {MIN_CELL_SIZE}-{MAX_CELL_SIZE} (default: 5)",
    )
    parser.add_argument("--latest", type=int, help="Only the N most recent deliveries")
    parser.add_argument(
        "--delivery", action="append", metavar="ID",
        help="Only this delivery id (repeatable); applied before --latest",
    )
    parser.set_defaults(func=run)


def _delivery_rows(layout, records: list) -> list[dict]:
    start = next((r for r in records if isinstance(r, Annotation)
                  and r.kind is AnnotationKind.DELIVERY_START), None)
    if start is None:
        return []
    delivery_id = start.delivery_id
    end = End(start.fields.get("end", End.NORTH.value))
    samples = [r for r in records if isinstance(r, SensorSample)]
    balls = tracks_of_kind(samples, SensorKind.BALL)
    if not balls:
        return []
    ball = balls[0]
    rows = []

    bat_t = start.fields.get("bat_contact_t")
    try:
        if bat_t is not None:
            # only the inbound flight counts toward bowling speed
            ball_in = tracks_of_kind([s for s in ball.samples if s.t <= bat_t], SensorKind.BALL)[0]
            summary = bowling_summary(ball_in, layout, end)
        else:
            summary = bowling_summary(ball, layout, end)
        rows.append({
            "t": start.t,
            "kind": "bowling",
            "delivery_id": delivery_id,
            "release_speed_ms": summary.release_speed,
            "release_speed_kmh": to_kmh(summary.release_speed),
            "pitch": [summary.pitch_point.x, summary.pitch_point.y] if summary.pitch_point else None,
            "length": summary.length,
        })
    except (EngineError, IndexError) as exc:
        logger.info("delivery %s: no bowling summary: %s", delivery_id, exc)
        rows.append({"t": start.t, "kind": "analysis_error", "delivery_id": delivery_id,
                     "report": "bowling", "error": str(exc)})

    if bat_t is not None:
        try:
            power = strike_power(ball, bat_t)
            rows.append({
                "t": bat_t,
                "kind": "strike_power",
                "delivery_id": delivery_id,
                "striker": start.fields.get("striker"),
                "speed_ms": power,
                "speed_kmh": to_kmh(power),
            })
        except EngineError as exc:
            logger.info("delivery %s: no strike power: %s", delivery_id, exc)
            rows.append({"t": bat_t, "kind": "analysis_error", "delivery_id": delivery_id,
                         "report": "strike_power", "error": str(exc)})
    return rows


async def _analyze_deliveries(layout, slices: list[list]) -> list[dict]:
    # deliveries are independent; gather keeps log order
    per_delivery = await asyncio.gather(*(asyncio.to_thread(_delivery_rows, layout, s) for s in slices))
    rows = [row for part in per_delivery for row in part]
    rows.sort(key=lambda r: (r["t"], r["delivery_id"]))
    return rows


def build_report(layout, records: list, cell_size: float, latest=None, deliveries=None) -> list[dict]:
    ids = set(deliveries) if deliveries else None
    slices = apply_latest(select_deliveries(split_deliveries(records), ids), latest)
    rows = run_async(_analyze_deliveries(layout, slices))
    last_t = records[-1].t if records else 0.0

    for pid, rec in batting_records(slices, decisions_in(records)).items():
        try:
            rate = strike_rate(rec)
        except EngineError:
            rate = None
        rows.append({"t": last_t, "kind": "batting", "player_id": pid, "runs": rec.runs,
                     "balls_faced": rec.balls_faced, "strike_rate": rate})

    samples = [r for s in slices for r in s if isinstance(r, SensorSample)]
    players = tracks_of_kind(samples, SensorKind.PLAYER)
    for pid, cov in fielder_coverage(players, cell_size).items():
        rows.append({"t": last_t, "kind": "fielding", "player_id": pid,
                     "distance_m": cov.distance_covered,
                     "cells": len(cov.grid.occupied_cells()),
                     "occupancy_s": cov.grid.total_occupancy()})
    return rows


def run(args, config) -> int:
    if not (MIN_CELL_SIZE <= args.cell_size <= MAX_CELL_SIZE):
        raise InvalidSpec("cell_size", f"must lie in [{MIN_CELL_SIZE}, {MAX_CELL_SIZE}]")
    _, records = read_log(args.log)
    rows = build_report(config["layout"], records, args.cell_size, args.latest, args.delivery)

    out = config["out"]
    if out == "-":
        write_ndjson(rows, sys.stdout)
    else:
        try:
            with open(out, "w", encoding="utf-8") as fh:
                write_ndjson(rows, fh)
        except OSError as exc:
            raise IoFailure(out, exc.strerror or str(exc)) from None

    table = [
        {"kind": r["kind"], "who": r.get("delivery_id") or r.get("player_id"),
         "value": r.get("release_speed_kmh", r.get("speed_kmh", r.get("strike_rate", r.get("distance_m"))))}
        for r in rows
    ]
    if not args.json:
        print_result(table, stream=summary_stream(out))
    return 0
