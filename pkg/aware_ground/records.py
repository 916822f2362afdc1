"""Non-sample log records and the total order used when serialising ties."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Mapping

from aware_ground.positioning import SensorSample


class AnnotationKind(str, enum.Enum):
    DELIVERY_START = "delivery_start"
    DELIVERY_END = "delivery_end"


@dataclass(frozen=True)
class Annotation:
    """Delivery markers. delivery_start carries delivery_id, over, end, striker
    and optionally bat_contact_t; delivery_end carries delivery_id and runs."""

    t: float
    kind: AnnotationKind
    fields: Mapping[str, Any] = field(default_factory=dict)

    @property
    def delivery_id(self) -> str:
        return str(self.fields.get("delivery_id", ""))


def record_key(record) -> tuple:
    """(t, rank, id): starts before samples, samples by sensor id, ends last."""
    if isinstance(record, SensorSample):
        return (record.t, 1, record.sensor_id)
    if isinstance(record, Annotation):
        rank = 0 if record.kind is AnnotationKind.DELIVERY_START else 2
        return (record.t, rank, record.delivery_id)
    return (record.t, 3, "")
