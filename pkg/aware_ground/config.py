"""Command configuration: layout file, fielding rule and simulation knobs."""

from __future__ import annotations

import asyncio
from typing import Optional

from aware_ground.decisions import FieldingRule
from aware_ground.errors import IoFailure
from aware_ground.ground import GroundLayout, default_layout, load_layout
from aware_ground.parsing import parse_over_range


def read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise IoFailure(path, exc.strerror or str(exc)) from None


def load_layout_file(path: Optional[str]) -> GroundLayout:
    """Layout from a config file, or the standard ground when no path is given."""
    if not path:
        return default_layout()
    return load_layout(read_text(path), path)


def resolve_config(args) -> dict:
    """Merge CLI flags and the layout file. Environment variables are not consulted."""
    overs = getattr(args, "rule_overs", None) or "1-15"
    return {
        "layout": load_layout_file(getattr(args, "layout", None)),
        "rule": FieldingRule(parse_over_range(overs), getattr(args, "rule_max_outside", 2)),
        "seed": getattr(args, "seed", 0) or 0,
        "noise": getattr(args, "noise", 0.0),
        "out": getattr(args, "out", None) or "-",
    }


def run_async(coro):
    """Thin wrapper around asyncio.run()."""
    return asyncio.run(coro)
