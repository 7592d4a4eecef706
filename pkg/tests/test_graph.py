import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ambigraph.errors import TimeOrderViolation, UnknownNode
from ambigraph.graph import (
    EdgeFeatures,
    NodeFeatures,
    RelationKind,
    SignalEvent,
    Snapshot,
    apply_signal,
    dump_events_jsonl,
    load_events_jsonl,
    snapshot_from_dict,
    snapshot_to_dict,
    union_basis,
    validate,
)


def two_node_snapshot():
    return Snapshot(
        t=0,
        nodes={"A": NodeFeatures(relevance=0.8), "B": NodeFeatures(relevance=0.4)},
        edges={("A", "B", RelationKind.SUPPORTS): EdgeFeatures(weight=0.5)},
    )


class TestApplySignal:
    def test_empty_delta_advances_time_only(self):
        snap = two_node_snapshot()
        out = apply_signal(snap, SignalEvent(t=3, target="A"))
        assert out.t == 3
        assert out.nodes == snap.nodes
        assert out.edges == snap.edges

    def test_relevance_clamps_at_one(self):
        snap = two_node_snapshot()
        out = apply_signal(snap, SignalEvent(t=1, target="A", add={"relevance": 1.5}))
        assert out.nodes["A"].relevance == 1.0

    def test_edge_with_missing_endpoint_rejected(self):
        snap = Snapshot(t=0, nodes={"A": NodeFeatures()})
        event = SignalEvent(
            t=1, target=("A", "B", RelationKind.SUPPORTS), set={"weight": 0.5}
        )
        with pytest.raises(UnknownNode):
            apply_signal(snap, event)

    def test_decreasing_time_rejected(self):
        snap = two_node_snapshot()
        later = apply_signal(snap, SignalEvent(t=5, target="A"))
        with pytest.raises(TimeOrderViolation):
            apply_signal(later, SignalEvent(t=4, target="A"))

    def test_creates_node_with_defaults(self):
        snap = two_node_snapshot()
        out = apply_signal(snap, SignalEvent(t=1, target="C", set={"relevance": 0.3}))
        assert out.nodes["C"].relevance == 0.3
        assert out.nodes["C"].risk == 0.0

    def test_zero_weight_removes_edge(self):
        snap = two_node_snapshot()
        out = apply_signal(
            snap,
            SignalEvent(t=1, target=("A", "B", RelationKind.SUPPORTS), set={"weight": 0.0}),
        )
        assert not out.edges

    def test_self_loop_rejected(self):
        snap = two_node_snapshot()
        with pytest.raises(UnknownNode):
            apply_signal(
                snap,
                SignalEvent(t=1, target=("A", "A", RelationKind.SUPPORTS), set={"weight": 0.5}),
            )

    def test_pure_and_input_unchanged(self):
        snap = two_node_snapshot()
        event = SignalEvent(t=2, target="A", add={"relevance": 0.1})
        out1 = apply_signal(snap, event)
        out2 = apply_signal(snap, event)
        assert out1 == out2
        assert snap.t == 0
        assert snap.nodes["A"].relevance == 0.8


class TestValidate:
    def test_well_formed(self):
        snap = Snapshot(
            t=0,
            nodes={"A": NodeFeatures(0.5), "B": NodeFeatures(0.5), "C": NodeFeatures(0.5)},
            edges={("A", "B", RelationKind.DEPENDS_ON): EdgeFeatures(0.2)},
        )
        assert validate(snap) == []

    def test_missing_endpoint_named(self):
        snap = Snapshot(
            t=0,
            nodes={"A": NodeFeatures()},
            edges={("A", "B", RelationKind.SUPPORTS): EdgeFeatures(0.2)},
        )
        problems = validate(snap)
        assert len(problems) == 1
        assert "'B'" in problems[0]

    def test_self_loop_named(self):
        snap = Snapshot(
            t=0,
            nodes={"A": NodeFeatures()},
            edges={("A", "A", RelationKind.SUPPORTS): EdgeFeatures(0.2)},
        )
        problems = validate(snap)
        assert any("self-loop" in p and "'A'" in p for p in problems)


class TestUnionBasis:
    def test_overlap(self):
        a = Snapshot(nodes={"X": NodeFeatures(), "Y": NodeFeatures()})
        b = Snapshot(nodes={"Y": NodeFeatures(), "Z": NodeFeatures()})
        assert union_basis(a, b) == ["X", "Y", "Z"]

    def test_identity(self):
        a = Snapshot(nodes={"X": NodeFeatures()})
        assert union_basis(a, a) == ["X"]

    def test_ordering(self):
        a = Snapshot(nodes={"B": NodeFeatures(), "A": NodeFeatures()})
        b = Snapshot(nodes={})
        assert union_basis(a, b) == ["A", "B"]

    def test_commutative(self):
        a = Snapshot(nodes={"X": NodeFeatures(), "Q": NodeFeatures()})
        b = Snapshot(nodes={"Y": NodeFeatures()})
        assert union_basis(a, b) == union_basis(b, a)


node_events = st.builds(
    SignalEvent,
    t=st.integers(min_value=1, max_value=100),
    target=st.sampled_from(["A", "B", "C"]),
    set=st.dictionaries(
        st.sampled_from(["relevance", "uncertainty", "risk", "phase"]),
        st.floats(min_value=-10, max_value=10, allow_nan=False),
        max_size=3,
    ),
    add=st.dictionaries(
        st.sampled_from(["relevance", "uncertainty", "risk", "phase"]),
        st.floats(min_value=-10, max_value=10, allow_nan=False),
        max_size=3,
    ),
)


@settings(max_examples=200, deadline=None)
@given(st.lists(node_events, max_size=20))
def test_bounds_hold_after_any_event_stream(events):
    snap = Snapshot(t=0, nodes={"A": NodeFeatures(), "B": NodeFeatures(), "C": NodeFeatures()})
    for event in sorted(events, key=lambda e: e.t):
        snap = apply_signal(snap, event)
    assert validate(snap) == []
    for feats in snap.nodes.values():
        assert 0.0 <= feats.relevance <= 1.0
        assert 0.0 <= feats.uncertainty <= 1.0
        assert 0.0 <= feats.risk <= 1.0
        assert -math.pi <= feats.phase <= math.pi


def test_snapshot_json_round_trip():
    snap = two_node_snapshot()
    assert snapshot_from_dict(snapshot_to_dict(snap)) == snap


def test_events_jsonl_round_trip():
    events = [
        SignalEvent(t=1, target="A", add={"relevance": 0.25}, provenance="Behavioral"),
        SignalEvent(t=2, target=("A", "B", RelationKind.CONTRADICTS), set={"weight": 0.7}),
    ]
    assert load_events_jsonl(dump_events_jsonl(events)) == events
