"""Append-only episode log and per-actor adaptive divergence baselines.

The durable format is JSON Lines with canonical field order: one episode
per line, never rewritten. Replaying the file reconstructs the in-memory
index exactly.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace
from typing import Optional

from .divergence import DivergenceSample, RogueCandidate
from .errors import DuplicateEpisode
from .loop import (
    ClarificationAnswer,
    ClarificationRequest,
    Interpretation,
    answer_from_dict,
    answer_to_dict,
    request_to_dict,
)


@dataclass(frozen=True)
class RogueEpisode:
    episode_id: str
    actor_id: str
    opened_at: int
    closed_at: int
    candidate: RogueCandidate
    request: ClarificationRequest
    answer: Optional[ClarificationAnswer]
    resolved: bool
    # relation-kind counts of the segment's induced subgraph at detection
    # time, captured here so cross-actor aggregation never needs the graph
    segment_relations: dict[str, int] = field(default_factory=dict)
    window_length: int = 12

    def check(self) -> None:
        if self.closed_at < self.opened_at:
            raise ValueError("closed_at before opened_at")
        has_choice = self.answer is not None and self.answer.chosen is not None
        if self.resolved != has_choice:
            raise ValueError("resolved flag inconsistent with answer")


def episode_to_dict(ep: RogueEpisode) -> dict:
    return {
        "episode_id": ep.episode_id,
        "actor_id": ep.actor_id,
        "opened_at": ep.opened_at,
        "closed_at": ep.closed_at,
        "segment": sorted(ep.candidate.segment),
        "loadings": {k: ep.candidate.loadings[k] for k in sorted(ep.candidate.loadings)},
        "baseline_divergence": ep.candidate.baseline_divergence,
        "ablated_divergence": ep.candidate.ablated_divergence,
        "reduction": ep.candidate.reduction,
        "windows_persisted": ep.candidate.windows_persisted,
        "request": request_to_dict(ep.request),
        "answer": answer_to_dict(ep.answer) if ep.answer else None,
        "resolved": ep.resolved,
        "segment_relations": {k: ep.segment_relations[k] for k in sorted(ep.segment_relations)},
        "window_length": ep.window_length,
    }


def episode_from_dict(data: dict) -> RogueEpisode:
    candidate = RogueCandidate(
        segment=frozenset(data["segment"]),
        loadings=dict(data.get("loadings", {})),
        baseline_divergence=data["baseline_divergence"],
        ablated_divergence=data["ablated_divergence"],
        reduction=data["reduction"],
        windows_persisted=data.get("windows_persisted", 0),
    )
    req = data["request"]
    request = ClarificationRequest(
        id=req["id"],
        issued_at=req["issued_at"],
        statement=req["statement"],
        question=req["question"],
        options=tuple(
            Interpretation(label=o["label"], keep_nodes=frozenset(o["keep_nodes"]))
            for o in req["options"]
        ),
        triggering=candidate,
    )
    answer = answer_from_dict(data["answer"]) if data.get("answer") else None
    return RogueEpisode(
        episode_id=data["episode_id"],
        actor_id=data["actor_id"],
        opened_at=data["opened_at"],
        closed_at=data["closed_at"],
        candidate=candidate,
        request=request,
        answer=answer,
        resolved=data["resolved"],
        segment_relations=dict(data.get("segment_relations", {})),
        window_length=data.get("window_length", 12),
    )


class EpisodeStore:
    """Durable append-only episode log backed by a JSONL file.

    Pass ``path=None`` for a purely in-memory store (tests, dry runs).
    """

    def __init__(self, path: Optional[str] = None):
        self.path = path
        self._episodes: list[RogueEpisode] = []
        self._ids: set[str] = set()
        if path and os.path.exists(path):
            with open(path, "r", encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        self._index(episode_from_dict(json.loads(line)))

    def _index(self, episode: RogueEpisode) -> None:
        if episode.episode_id in self._ids:
            raise DuplicateEpisode(episode.episode_id)
        self._episodes.append(episode)
        self._ids.add(episode.episode_id)

    def record(self, episode: RogueEpisode) -> str:
        episode.check()
        self._index(episode)
        if self.path:
            line = json.dumps(
                episode_to_dict(episode), sort_keys=True, separators=(",", ":")
            )
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
        return episode.episode_id

    def query(
        self,
        actor_id: Optional[str] = None,
        t_from: Optional[int] = None,
        t_to: Optional[int] = None,
        segment_overlap: Optional[set[str]] = None,
    ) -> list[RogueEpisode]:
        out = []
        for ep in self._episodes:
            if actor_id is not None and ep.actor_id != actor_id:
                continue
            if t_from is not None and ep.opened_at < t_from:
                continue
            if t_to is not None and ep.opened_at > t_to:
                continue
            if segment_overlap is not None and not (ep.candidate.segment & segment_overlap):
                continue
            out.append(ep)
        return sorted(out, key=lambda e: (e.opened_at, e.episode_id))

    def __len__(self) -> int:
        return len(self._episodes)

    def all(self) -> list[RogueEpisode]:
        return list(self._episodes)


@dataclass(frozen=True)
class Baseline:
    actor_id: str
    epsilon_ewma: float = 0.0
    epsilon_var: float = 0.0
    episodes_seen: int = 0


def update_baseline(
    baseline: Baseline, sample: DivergenceSample, alpha: float = 0.1
) -> Baseline:
    """EWMA update of the actor's expected divergence level and spread."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha outside (0, 1)")
    eps = sample.epsilon
    diff = eps - baseline.epsilon_ewma
    ewma = (1.0 - alpha) * baseline.epsilon_ewma + alpha * eps
    var = (1.0 - alpha) * baseline.epsilon_var + alpha * diff * diff
    return replace(
        baseline,
        epsilon_ewma=ewma,
        epsilon_var=var,
        episodes_seen=baseline.episodes_seen + 1,
    )


def adaptive_threshold(baseline: Baseline, floor: float = 0.3) -> float:
    """EWMA + 2 sigma inclusion threshold, clamped to [floor, 1]."""
    raw = baseline.epsilon_ewma + 2.0 * math.sqrt(max(0.0, baseline.epsilon_var))
    return min(1.0, max(floor, raw))
