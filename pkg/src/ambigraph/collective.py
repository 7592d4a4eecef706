"""Privacy-preserving cross-actor aggregation of episode signatures.

Signatures carry only structure: a salted one-way hash of the actor id,
relation-kind counts of the rogue segment's induced subgraph, segment
size, outcome, and window length. No node ids, labels, feature values, or
free text can leave an actor's engine through this module. Aggregation
applies a k-anonymity style floor on distinct actors per pattern.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

from .memory import RogueEpisode


@dataclass(frozen=True)
class EpisodeSignature:
    actor_hash: str
    relation_profile: tuple[tuple[str, int], ...]  # sorted (kind, count) pairs
    segment_size: int
    resolved: bool
    window_length: int


@dataclass(frozen=True)
class PopulationPattern:
    relation_profile: tuple[tuple[str, int], ...]
    actor_count: int
    episode_count: int
    unresolved_fraction: float


@dataclass(frozen=True)
class CollectiveAlert:
    relation_profile: tuple[tuple[str, int], ...]
    actor_count: int
    unresolved_fraction: float


def profile_key(profile: tuple[tuple[str, int], ...]) -> str:
    return "|".join(f"{kind}:{count}" for kind, count in profile)


def anonymize(episode: RogueEpisode, salt: str) -> EpisodeSignature:
    digest = hashlib.sha256((salt + ":" + episode.actor_id).encode("utf-8")).hexdigest()
    profile = tuple(sorted(episode.segment_relations.items()))
    return EpisodeSignature(
        actor_hash=digest,
        relation_profile=profile,
        segment_size=len(episode.candidate.segment),
        resolved=episode.resolved,
        window_length=episode.window_length,
    )


def aggregate(
    signatures: Sequence[EpisodeSignature], min_actors: int = 2
) -> list[PopulationPattern]:
    if min_actors < 2:
        raise ValueError("min_actors must be >= 2")
    groups: dict[tuple[tuple[str, int], ...], list[EpisodeSignature]] = {}
    for sig in signatures:
        groups.setdefault(sig.relation_profile, []).append(sig)
    patterns = []
    for profile, sigs in groups.items():
        actors = {s.actor_hash for s in sigs}
        if len(actors) < min_actors:
            continue
        unresolved = sum(1 for s in sigs if not s.resolved)
        patterns.append(
            PopulationPattern(
                relation_profile=profile,
                actor_count=len(actors),
                episode_count=len(sigs),
                unresolved_fraction=unresolved / len(sigs),
            )
        )
    patterns.sort(key=lambda p: (-p.episode_count, profile_key(p.relation_profile)))
    return patterns


def alert(
    patterns: Sequence[PopulationPattern],
    unresolved_threshold: float = 0.5,
    actor_floor: int = 3,
) -> list[CollectiveAlert]:
    """Descriptive population alerts; never feeds back into actor engines."""
    return [
        CollectiveAlert(
            relation_profile=p.relation_profile,
            actor_count=p.actor_count,
            unresolved_fraction=p.unresolved_fraction,
        )
        for p in patterns
        if p.unresolved_fraction >= unresolved_threshold and p.actor_count >= actor_floor
    ]


def pattern_to_dict(pattern: PopulationPattern) -> dict:
    return {
        "relation_profile": profile_key(pattern.relation_profile),
        "actor_count": pattern.actor_count,
        "episode_count": pattern.episode_count,
        "unresolved_fraction": pattern.unresolved_fraction,
    }
