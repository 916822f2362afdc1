"""Structured output helpers for CLI results."""

from __future__ import annotations

import json
import sys
from typing import IO, Any, Optional

from aware_ground.store import encode_record


def summary_stream(out: Optional[str]) -> IO[str]:
    """Where human-facing text goes: stderr when stdout carries records."""
    return sys.stderr if out == "-" else sys.stdout


def print_result(data: Any, json_mode: bool = False, stream: Optional[IO[str]] = None) -> None:
    """Print a dict as aligned key:value pairs, a list as a table, or raw JSON."""
    stream = stream or sys.stdout
    if json_mode:
        print(json.dumps(data, indent=2, default=str), file=stream)
        return

    if isinstance(data, dict):
        if not data:
            return
        max_key = max(len(str(k)) for k in data)
        for k, v in data.items():
            print(f"  {str(k):<{max_key}}  {_fmt(v)}", file=stream)
    elif isinstance(data, list):
        if not data:
            return
        if isinstance(data[0], dict):
            keys = list(data[0].keys())
            widths = {k: max(len(k), *(len(_fmt(row.get(k, ""))) for row in data)) for k in keys}
            print("  ".join(f"{k:<{widths[k]}}" for k in keys), file=stream)
            print("  ".join("-" * widths[k] for k in keys), file=stream)
            for row in data:
                print("  ".join(f"{_fmt(row.get(k, '')):<{widths[k]}}" for k in keys), file=stream)
        else:
            for item in data:
                print(f"  {item}", file=stream)
    else:
        print(data, file=stream)


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.3f}"
    if value is None:
        return "-"
    return str(value)


def print_error(msg: str, json_mode: bool = False) -> None:
    """Print error to stderr."""
    if json_mode:
        print(json.dumps({"error": msg}), file=sys.stderr)
    else:
        print(f"Error: {msg}", file=sys.stderr)


def write_ndjson(rows, stream: IO[str]) -> None:
    """One compact JSON object per line; log records use the log encoding."""
    for row in rows:
        if isinstance(row, dict):
            stream.write(json.dumps(row, separators=(",", ":"), allow_nan=False) + "\n")
        else:
            stream.write(encode_record(row) + "\n")
    stream.flush()
