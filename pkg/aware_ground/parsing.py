"""Value parsers for config documents and CLI flags."""

from __future__ import annotations

import io
import math
import re
from typing import Optional

from dotenv.parser import parse_stream

from aware_ground.errors import ParseError

_OVER_RANGE = re.compile(r"(\d+)-(\d+)")


def parse_float(text: str) -> float:
    """Parse a finite decimal number."""
    try:
        value = float(text.strip())
    except ValueError:
        raise ValueError(f"Invalid number: {text!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"Number must be finite, got {text!r}")
    return value


def parse_point(text: str, dims: int) -> tuple[float, ...]:
    """Parse 'x,y' or 'x,y,z' into a tuple of floats."""
    parts = text.split(",")
    if len(parts) != dims:
        raise ValueError(f"Expected {dims} comma-separated numbers, got {text!r}")
    return tuple(parse_float(p) for p in parts)


def parse_over_range(text: str) -> tuple[int, int]:
    """Parse an inclusive over range like '1-15'."""
    match = _OVER_RANGE.fullmatch(text.strip())
    if not match:
        raise ValueError(f"Invalid over range: {text!r}. Use e.g. 1-15")
    first, last = int(match.group(1)), int(match.group(2))
    if first < 1 or last < first:
        raise ValueError(f"Invalid over range: must satisfy 1 <= first <= last, got {text!r}")
    return first, last


def format_point(values) -> str:
    """Inverse of parse_point using shortest round-trip floats."""
    return ",".join(repr(float(v)) for v in values)


def _line_of(binding) -> int:
    # a binding's original text starts with any blank lines that preceded it
    raw = binding.original.string
    leading = raw[: len(raw) - len(raw.lstrip())]
    return binding.original.line + leading.count("\n")


def read_document(text: str, path: Optional[str] = None) -> list[tuple[str, str, int]]:
    """Tokenise a `key = value` document into (key, value, line) entries.

    Blank lines and `#` comments are skipped. Malformed lines, keys without a
    value and repeated keys raise ParseError naming the line.
    """
    entries: list[tuple[str, str, int]] = []
    seen: dict[str, int] = {}
    for binding in parse_stream(io.StringIO(text)):
        line = _line_of(binding)
        if binding.error:
            raise ParseError(f"malformed statement {binding.original.string.strip()!r}", line, path)
        if binding.key is None:
            continue
        if binding.value is None:
            raise ParseError(f"missing '=' after key {binding.key!r}", line, path)
        if binding.key in seen:
            raise ParseError(f"duplicate key {binding.key!r} (first on line {seen[binding.key]})", line, path)
        seen[binding.key] = line
        entries.append((binding.key, binding.value.strip(), line))
    return entries
