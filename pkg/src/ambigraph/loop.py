"""Clarification state machine: suspend, guard, resolve.

On a persistent rogue detection the engine suspends all autonomous
inference and issues exactly one neutral, template-generated question with
2-5 interpretation options. The human's answer collapses the state onto
the chosen interpretation subspace (or leaves it untouched if unresolved).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from .divergence import RogueCandidate
from .errors import AlreadySuspended, NotSuspended, UnknownRequest
from .graph import Snapshot
from .quantum import StateVector, collapse

AMPLITUDE_FLOOR = 1e-9
MAX_CLUSTER_OPTIONS = 4  # plus the always-present "none of these" option


class InferenceKind(Enum):
    PREDICT = "predict"
    RECOMMEND = "recommend"
    ACT = "act"
    INSPECT = "inspect"


@dataclass(frozen=True)
class Interpretation:
    label: str
    keep_nodes: frozenset[str]


@dataclass(frozen=True)
class ClarificationRequest:
    id: str
    issued_at: int
    statement: str
    question: str
    options: tuple[Interpretation, ...]
    triggering: RogueCandidate


UNRESOLVED = None  # marker value for ClarificationAnswer.chosen


@dataclass(frozen=True)
class ClarificationAnswer:
    request_id: str
    chosen: Optional[int]  # option index, or None for "unresolved"
    answered_at: int
    free_text: str = ""


@dataclass(frozen=True)
class Refusal:
    request_id: str
    reason: str = "engine suspended pending clarification"


@dataclass(frozen=True)
class Permit:
    pass


def _neighbor_clusters(snapshot: Snapshot, segment: frozenset[str]) -> list[frozenset[str]]:
    """Maximal connected clusters among the segment's neighbor nodes.

    Edges are treated as undirected regardless of kind; only edges between
    neighbor nodes join clusters. Deterministic order: largest first, then
    smallest member id.
    """
    neighbors: set[str] = set()
    for src, dst, _kind in snapshot.edges:
        if src in segment and dst not in segment:
            neighbors.add(dst)
        elif dst in segment and src not in segment:
            neighbors.add(src)
    adjacency: dict[str, set[str]] = {n: set() for n in neighbors}
    for src, dst, _kind in snapshot.edges:
        if src in neighbors and dst in neighbors:
            adjacency[src].add(dst)
            adjacency[dst].add(src)
    clusters: list[frozenset[str]] = []
    seen: set[str] = set()
    for start in sorted(neighbors):
        if start in seen:
            continue
        stack = [start]
        component: set[str] = set()
        while stack:
            node = stack.pop()
            if node in component:
                continue
            component.add(node)
            stack.extend(adjacency[node] - component)
        seen |= component
        clusters.append(frozenset(component))
    clusters.sort(key=lambda c: (-len(c), min(c)))
    return clusters


def _option_label(nodes: frozenset[str]) -> str:
    return "Related to: " + ", ".join(sorted(nodes))


def build_request(
    request_id: str,
    candidate: RogueCandidate,
    snapshot: Snapshot,
    state: StateVector,
    issued_at: int,
) -> ClarificationRequest:
    """Generate the single neutral clarification question for a candidate."""
    segment = candidate.segment
    seg_list = ", ".join(sorted(segment))
    options: list[Interpretation] = []
    basis_set = set(state.basis)
    weights = state.weights()

    def subspace_weight(nodes: frozenset[str]) -> float:
        idx = {n: i for i, n in enumerate(state.basis)}
        return sum(float(weights[idx[n]]) for n in nodes if n in idx)

    for cluster in _neighbor_clusters(snapshot, segment)[:MAX_CLUSTER_OPTIONS]:
        keep = frozenset((cluster | segment) & basis_set)
        if keep and subspace_weight(keep) >= AMPLITUDE_FLOOR:
            options.append(Interpretation(label=_option_label(cluster), keep_nodes=keep))
    if not options:
        keep = frozenset(segment & basis_set)
        if keep and subspace_weight(keep) >= AMPLITUDE_FLOOR:
            options.append(Interpretation(label=_option_label(segment), keep_nodes=keep))
        else:
            # fall back to the currently most active node
            top = max(state.basis, key=lambda n: (state.weight_of(n), n))
            options.append(
                Interpretation(label=_option_label(frozenset([top])), keep_nodes=frozenset([top]))
            )
    options.append(
        Interpretation(label="None of these / other", keep_nodes=frozenset(state.basis))
    )
    statement = (
        f"Signals involving {seg_list} have repeatedly diverged from expectations "
        "across recent observation windows. The situation admits more than one reading."
    )
    question = (
        f"Which of the following readings best matches what is currently known about {seg_list}?"
    )
    return ClarificationRequest(
        id=request_id,
        issued_at=issued_at,
        statement=statement,
        question=question,
        options=tuple(options),
        triggering=candidate,
    )


@dataclass
class DecoherenceLoop:
    """Engine mode holder: Autonomous, or Suspended with one pending request."""

    pending: Optional[ClarificationRequest] = None

    @property
    def suspended(self) -> bool:
        return self.pending is not None

    def suspend(
        self,
        request_id: str,
        candidate: RogueCandidate,
        snapshot: Snapshot,
        state: StateVector,
        issued_at: int,
    ) -> ClarificationRequest:
        if self.pending is not None:
            raise AlreadySuspended(f"request {self.pending.id} already pending")
        self.pending = build_request(request_id, candidate, snapshot, state, issued_at)
        return self.pending

    def guard(self, kind: InferenceKind) -> Union[Permit, Refusal]:
        if kind is InferenceKind.INSPECT or self.pending is None:
            return Permit()
        return Refusal(request_id=self.pending.id)

    def resolve(
        self, answer: ClarificationAnswer, state: StateVector
    ) -> tuple[StateVector, bool, ClarificationRequest]:
        """Apply an answer: returns (new state, resolved?, the closed request)."""
        if self.pending is None:
            raise NotSuspended("no clarification pending")
        request = self.pending
        if answer.request_id != request.id:
            raise UnknownRequest(
                f"answer targets {answer.request_id!r}, pending is {request.id!r}"
            )
        if answer.chosen is not None:
            if not 0 <= answer.chosen < len(request.options):
                raise UnknownRequest(
                    f"option index {answer.chosen} outside 0..{len(request.options) - 1}"
                )
            new_state = collapse(state, request.options[answer.chosen].keep_nodes)
            resolved = True
        else:
            new_state = state
            resolved = False
        self.pending = None
        return new_state, resolved, request


# --- serialization -----------------------------------------------------------

def request_to_dict(request: ClarificationRequest) -> dict:
    return {
        "id": request.id,
        "issued_at": request.issued_at,
        "statement": request.statement,
        "question": request.question,
        "options": [
            {"label": o.label, "keep_nodes": sorted(o.keep_nodes)}
            for o in request.options
        ],
        "segment": sorted(request.triggering.segment),
    }


def answer_to_dict(answer: ClarificationAnswer) -> dict:
    return {
        "request_id": answer.request_id,
        "chosen": answer.chosen,
        "answered_at": answer.answered_at,
        "free_text": answer.free_text,
    }


def answer_from_dict(data: dict) -> ClarificationAnswer:
    return ClarificationAnswer(
        request_id=data["request_id"],
        chosen=data.get("chosen"),
        answered_at=int(data.get("answered_at", 0)),
        free_text=data.get("free_text", ""),
    )
