"""Tests for aware_ground.deliveries."""

from __future__ import annotations

from aware_ground.decisions import DecisionEvent, DecisionFailure, DecisionKind
from aware_ground.deliveries import (
    apply_latest,
    decisions_in,
    delivery_id_of,
    select_deliveries,
    split_deliveries,
)
from aware_ground.records import Annotation, AnnotationKind
from conftest import make_ball, make_player


def _start(t, did):
    return Annotation(t, AnnotationKind.DELIVERY_START, {"delivery_id": did, "over": 1, "end": "north"})


def _end(t, did):
    return Annotation(t, AnnotationKind.DELIVERY_END, {"delivery_id": did, "runs": 0})


def _log():
    return [
        make_player("f1", 0.0, 0.0, t=0.0),
        _start(1.0, "d1"),
        make_ball(1.0, -8.9),
        DecisionEvent(1.0, DecisionKind.NO_BALL, "legal", {}, "d1"),
        _end(2.0, "d1"),
        make_player("f1", 1.0, 0.0, t=2.5),
        _start(3.0, "d2"),
        make_ball(3.0, -8.9),
        DecisionFailure(3.5, DecisionKind.LBW, "NeverReaches: backwards", "d2"),
        _end(4.0, "d2"),
        _start(5.0, "d3"),
        make_ball(5.0, -8.9),
    ]


def test_split_drops_records_outside_deliveries():
    slices = split_deliveries(_log())
    assert [delivery_id_of(s) for s in slices] == ["d1", "d2", "d3"]
    assert len(slices[0]) == 4
    assert all(r.t >= 1.0 for s in slices for r in s)


def test_split_keeps_open_delivery():
    slices = split_deliveries(_log())
    assert slices[-1] == [_start(5.0, "d3"), make_ball(5.0, -8.9)]


def test_split_restart_closes_previous():
    records = [_start(0.0, "a"), make_ball(0.0, 1.0), _start(1.0, "b")]
    assert [delivery_id_of(s) for s in split_deliveries(records)] == ["a", "b"]


def test_split_empty():
    assert split_deliveries([]) == []
    assert split_deliveries([make_ball(0.0, 1.0)]) == []


def test_delivery_id_of_without_annotation():
    assert delivery_id_of([make_ball(0.0, 1.0)]) is None


def test_select_deliveries():
    slices = split_deliveries(_log())
    assert select_deliveries(slices, None) == slices
    assert [delivery_id_of(s) for s in select_deliveries(slices, {"d3", "d1"})] == ["d1", "d3"]
    assert select_deliveries(slices, {"d9"}) == []


def test_decisions_in():
    events = decisions_in(_log())
    assert len(events) == 1
    assert events[0].delivery_id == "d1"


def test_apply_latest():
    slices = split_deliveries(_log())
    assert apply_latest(slices, None) == slices
    assert apply_latest(slices, 0) == []
    assert [delivery_id_of(s) for s in apply_latest(slices, 2)] == ["d2", "d3"]
    assert apply_latest(slices, 10) == slices
