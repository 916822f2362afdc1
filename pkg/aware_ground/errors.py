"""Exception hierarchy shared by every tier; each class knows its CLI exit code."""

from __future__ import annotations

from typing import Optional

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DECISION = 3


class AwareGroundError(Exception):
    """Base class. Subclasses set exit_code for the CLI."""

    exit_code = EXIT_DATA


# -- Data errors (exit 2) -----------------------------------------------------

class ParseError(AwareGroundError):
    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        self.line = line
        self.path = path
        where = ""
        if path and line:
            where = f"{path}:{line}: "
        elif path:
            where = f"{path}: "
        elif line:
            where = f"line {line}: "
        super().__init__(f"{where}{message}")


class InvalidLayout(AwareGroundError):
    def __init__(self, field: str, message: str = ""):
        self.field = field
        super().__init__(f"invalid layout field {field!r}" + (f": {message}" if message else ""))


class InvalidSpec(AwareGroundError):
    def __init__(self, field: str, message: str = ""):
        self.field = field
        super().__init__(f"invalid scenario field {field!r}" + (f": {message}" if message else ""))


class OutOfOrder(AwareGroundError):
    """A record or sample arrived with a timestamp not after its predecessor."""


class CorruptRecord(AwareGroundError):
    def __init__(self, message: str, line: int, offset: int, path: Optional[str] = None):
        self.line = line
        self.offset = offset
        self.path = path
        prefix = f"{path}:" if path else "line "
        super().__init__(f"{prefix}{line} (byte {offset}): {message}")


class VersionMismatch(AwareGroundError):
    pass


class LayoutMismatch(AwareGroundError):
    pass


class IoFailure(AwareGroundError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


# -- Decision-engine errors (exit 3) ------------------------------------------

class EngineError(AwareGroundError):
    exit_code = EXIT_DECISION


class GeometryError(EngineError, ValueError):
    pass


class DegenerateTriangle(GeometryError):
    pass


class OutOfDomain(GeometryError):
    pass


class InsufficientAnchors(EngineError):
    pass


class DegenerateGeometry(EngineError):
    pass


class NoConvergence(EngineError):
    pass


class InvalidRangeSet(EngineError, ValueError):
    pass


class OutOfRange(EngineError, ValueError):
    pass


class InsufficientSamples(EngineError):
    pass


class IllConditioned(EngineError):
    pass


class NeverReaches(EngineError):
    pass


class NoBallsFaced(EngineError, ZeroDivisionError):
    pass


class DecisionError(EngineError):
    """A component error tagged with the decision kind it aborted."""

    def __init__(self, kind: str, cause: Exception):
        self.kind = kind
        self.cause = cause
        super().__init__(f"{kind}: {type(cause).__name__}: {cause}")
