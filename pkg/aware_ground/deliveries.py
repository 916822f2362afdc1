"""Slicing a match log into deliveries."""

from __future__ import annotations

from typing import Optional

from aware_ground.decisions import DecisionEvent
from aware_ground.records import Annotation, AnnotationKind


def split_deliveries(records: list) -> list[list]:
    """Group records between each delivery_start and its delivery_end.

    Records outside any delivery are dropped. A delivery still open at the
    end of the log is returned as it stands.
    """
    slices: list[list] = []
    current: Optional[list] = None
    for rec in records:
        if isinstance(rec, Annotation) and rec.kind is AnnotationKind.DELIVERY_START:
            if current:
                slices.append(current)
            current = [rec]
            continue
        if current is None:
            continue
        current.append(rec)
        if isinstance(rec, Annotation) and rec.kind is AnnotationKind.DELIVERY_END:
            slices.append(current)
            current = None
    if current:
        slices.append(current)
    return slices


def delivery_id_of(records: list) -> Optional[str]:
    """Id carried by the first annotation in a delivery slice."""
    for rec in records:
        if isinstance(rec, Annotation):
            return rec.delivery_id
    return None


def select_deliveries(slices: list[list], ids: Optional[set[str]]) -> list[list]:
    """Keep slices whose delivery id is in ids, in log order. None keeps all."""
    if ids is None:
        return slices
    return [s for s in slices if delivery_id_of(s) in ids]


def decisions_in(records: list) -> list[DecisionEvent]:
    return [r for r in records if isinstance(r, DecisionEvent)]


def apply_latest(slices: list[list], latest: Optional[int]) -> list[list]:
    """Keep the last N delivery slices, in log order."""
    if latest is None:
        return slices
    if latest <= 0:
        return []
    return slices[-latest:]
