"""Time-indexed directed signal graph: nodes, typed edges, feature updates.

Snapshots are immutable values; every update produces a new snapshot.
Node basis ordering is lexicographic by node id everywhere, so that
downstream matrices and eigenvectors are reproducible.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Mapping, Optional, Tuple, Union

from .errors import TimeOrderViolation, UnknownNode

PI = math.pi


class RelationKind(Enum):
    SUPPORTS = "Supports"
    CONTRADICTS = "Contradicts"
    DEPENDS_ON = "DependsOn"
    INCREASES_RISK_OF = "IncreasesRiskOf"
    TEMPORALLY_PRECEDES = "TemporallyPrecedes"


# Edge key: (source node id, target node id, relation kind)
EdgeKey = Tuple[str, str, RelationKind]

NODE_FEATURE_BOUNDS = {
    "relevance": (0.0, 1.0),
    "uncertainty": (0.0, 1.0),
    "risk": (0.0, 1.0),
    "phase": (-PI, PI),
}


def _clamp(value: float, lo: float, hi: float) -> float:
    return min(hi, max(lo, value))


@dataclass(frozen=True)
class NodeFeatures:
    relevance: float = 0.0
    uncertainty: float = 0.0
    risk: float = 0.0
    phase: float = 0.0

    def clamped(self) -> "NodeFeatures":
        return NodeFeatures(
            relevance=_clamp(self.relevance, 0.0, 1.0),
            uncertainty=_clamp(self.uncertainty, 0.0, 1.0),
            risk=_clamp(self.risk, 0.0, 1.0),
            phase=_clamp(self.phase, -PI, PI),
        )


@dataclass(frozen=True)
class EdgeFeatures:
    weight: float = 0.0


@dataclass(frozen=True)
class Snapshot:
    """State of one actor's graph at a discrete time index."""

    t: int = 0
    nodes: Mapping[str, NodeFeatures] = field(default_factory=dict)
    edges: Mapping[EdgeKey, EdgeFeatures] = field(default_factory=dict)

    def node_ids(self) -> list[str]:
        return sorted(self.nodes)

    def edges_incident(self, node_ids: Iterable[str]) -> list[EdgeKey]:
        touch = set(node_ids)
        return [k for k in self.edges if k[0] in touch or k[1] in touch]


@dataclass(frozen=True)
class SignalEvent:
    """One observed signal: a partial feature assignment on a node or edge.

    ``set`` entries overwrite a feature, ``add`` entries adjust it; the
    result is clamped to the feature's bounds either way. An edge whose
    weight lands at (or below) zero is dropped from the snapshot.
    """

    t: int
    target: Union[str, EdgeKey]
    set: Mapping[str, float] = field(default_factory=dict)
    add: Mapping[str, float] = field(default_factory=dict)
    provenance: str = "Contextual"  # Behavioral | Contextual | Internal

    @property
    def is_edge(self) -> bool:
        return isinstance(self.target, tuple)


def apply_signal(snapshot: Snapshot, event: SignalEvent) -> Snapshot:
    """Apply one signal event, returning a new snapshot at ``event.t``."""
    if event.t < snapshot.t:
        raise TimeOrderViolation(
            f"event at t={event.t} behind snapshot at t={snapshot.t}"
        )
    nodes = dict(snapshot.nodes)
    edges = dict(snapshot.edges)
    if event.is_edge:
        src, dst, kind = event.target
        if src not in nodes or dst not in nodes:
            missing = src if src not in nodes else dst
            raise UnknownNode(f"edge {src}->{dst} references missing node {missing!r}")
        if src == dst:
            raise UnknownNode(f"self-loop edge on {src!r} rejected")
        key = (src, dst, kind)
        weight = edges.get(key, EdgeFeatures()).weight
        if "weight" in event.set:
            weight = event.set["weight"]
        weight += event.add.get("weight", 0.0)
        weight = _clamp(weight, 0.0, 1.0)
        if weight <= 0.0:
            edges.pop(key, None)
        else:
            edges[key] = EdgeFeatures(weight=weight)
    else:
        node_id = event.target
        feats = nodes.get(node_id, NodeFeatures())
        values = {
            "relevance": feats.relevance,
            "uncertainty": feats.uncertainty,
            "risk": feats.risk,
            "phase": feats.phase,
        }
        for name, val in event.set.items():
            if name in values:
                values[name] = val
        for name, val in event.add.items():
            if name in values:
                values[name] += val
        nodes[node_id] = NodeFeatures(**values).clamped()
    return Snapshot(t=event.t, nodes=nodes, edges=edges)


def validate(snapshot: Snapshot) -> list[str]:
    """Return a list of invariant violations (empty iff well-formed)."""
    problems: list[str] = []
    for node_id, feats in snapshot.nodes.items():
        if not node_id:
            problems.append("empty node id")
        for name, (lo, hi) in NODE_FEATURE_BOUNDS.items():
            val = getattr(feats, name)
            if not lo <= val <= hi:
                problems.append(f"node {node_id!r}: {name}={val} outside [{lo}, {hi}]")
    for (src, dst, kind), feats in snapshot.edges.items():
        if src == dst:
            problems.append(f"self-loop edge on node {src!r}")
        for end in (src, dst):
            if end not in snapshot.nodes:
                problems.append(
                    f"edge ({src!r}, {dst!r}, {kind.value}) references missing node {end!r}"
                )
        if not 0.0 < feats.weight <= 1.0:
            problems.append(
                f"edge ({src!r}, {dst!r}, {kind.value}): weight={feats.weight} outside (0, 1]"
            )
    if snapshot.t < 0:
        problems.append(f"negative time index {snapshot.t}")
    return problems


def union_basis(a: Snapshot, b: Snapshot) -> list[str]:
    """Deterministic ordered union of the two snapshots' node ids."""
    return sorted(set(a.nodes) | set(b.nodes))


# --- serialization -----------------------------------------------------------

def snapshot_to_dict(snapshot: Snapshot) -> dict:
    return {
        "t": snapshot.t,
        "nodes": {
            nid: {
                "relevance": f.relevance,
                "uncertainty": f.uncertainty,
                "risk": f.risk,
                "phase": f.phase,
            }
            for nid, f in sorted(snapshot.nodes.items())
        },
        "edges": [
            {"from": src, "to": dst, "kind": kind.value, "weight": feats.weight}
            for (src, dst, kind), feats in sorted(
                snapshot.edges.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2].value)
            )
        ],
    }


def snapshot_from_dict(data: Mapping) -> Snapshot:
    nodes = {nid: NodeFeatures(**feats) for nid, feats in data.get("nodes", {}).items()}
    edges = {
        (e["from"], e["to"], RelationKind(e["kind"])): EdgeFeatures(weight=e["weight"])
        for e in data.get("edges", [])
    }
    return Snapshot(t=int(data.get("t", 0)), nodes=nodes, edges=edges)


def event_to_dict(event: SignalEvent) -> dict:
    out: dict = {"t": event.t, "provenance": event.provenance}
    if event.is_edge:
        src, dst, kind = event.target
        out["edge"] = [src, dst, kind.value]
    else:
        out["node"] = event.target
    if event.set:
        out["set"] = dict(sorted(event.set.items()))
    if event.add:
        out["add"] = dict(sorted(event.add.items()))
    return out


def event_from_dict(data: Mapping) -> SignalEvent:
    if "edge" in data:
        src, dst, kind = data["edge"]
        target: Union[str, EdgeKey] = (src, dst, RelationKind(kind))
    else:
        target = data["node"]
    return SignalEvent(
        t=int(data["t"]),
        target=target,
        set=dict(data.get("set", {})),
        add=dict(data.get("add", {})),
        provenance=data.get("provenance", "Contextual"),
    )


def dump_events_jsonl(events: Iterable[SignalEvent]) -> str:
    return "".join(
        json.dumps(event_to_dict(e), sort_keys=True, separators=(",", ":")) + "\n"
        for e in events
    )


def load_events_jsonl(text: str) -> list[SignalEvent]:
    return [event_from_dict(json.loads(line)) for line in text.splitlines() if line.strip()]
