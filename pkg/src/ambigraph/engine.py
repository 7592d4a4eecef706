"""Per-actor engine loop tying graph, state, detection, and clarification.

One engine owns one actor's stream: it evolves a prior between
observation steps, rebuilds the observed state from incoming signals,
tracks divergence, and suspends itself (issuing a clarification request)
when a rogue segment persists. All mutation goes through a single writer;
reads of mode and snapshots are safe at any time.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .divergence import (
    DivergenceSample,
    RogueCandidate,
    RollingDetector,
    StepRecord,
    WindowConfig,
    divergence,
)
from .errors import AlreadySuspended, ZeroNorm
from .graph import SignalEvent, Snapshot, apply_signal
from .loop import (
    ClarificationAnswer,
    ClarificationRequest,
    DecoherenceLoop,
    InferenceKind,
    Permit,
    Refusal,
)
from .memory import Baseline, EpisodeStore, RogueEpisode, update_baseline
from .quantum import (
    HamiltonianGains,
    StateVector,
    build_hamiltonian,
    build_state,
    evolve,
)


@dataclass(frozen=True)
class EngineConfig:
    window: WindowConfig = field(default_factory=WindowConfig)
    gains: HamiltonianGains = field(default_factory=HamiltonianGains)
    dt: float = 1.0
    baseline_alpha: float = 0.1


def segment_relation_counts(snapshot: Snapshot, segment: frozenset[str]) -> dict[str, int]:
    """Relation-kind counts of the segment's induced subgraph."""
    counts: dict[str, int] = {}
    for (src, dst, kind), _f in snapshot.edges.items():
        if src in segment and dst in segment:
            counts[kind.value] = counts.get(kind.value, 0) + 1
    return counts


class ActorEngine:
    def __init__(
        self,
        actor_id: str,
        initial: Snapshot = Snapshot(),
        config: EngineConfig = EngineConfig(),
        store: Optional[EpisodeStore] = None,
    ):
        self.actor_id = actor_id
        self.config = config
        self.snapshot = initial
        self.state: Optional[StateVector] = None
        self.loop = DecoherenceLoop()
        self.detector = RollingDetector(config.window, config.gains, config.dt)
        self.store = store if store is not None else EpisodeStore()
        self.baseline = Baseline(actor_id=actor_id)
        self.trace: list[DivergenceSample] = []
        self.detections: list[tuple[int, RogueCandidate]] = []
        # segment -> time index until which re-suspension is embargoed
        self.embargo: dict[frozenset[str], int] = {}
        self._request_ordinal = 0
        self._episode_ordinal = 0
        self._suspended_at: Optional[int] = None
        self._pending_candidate: Optional[RogueCandidate] = None

    # --- mode & guarded inference -------------------------------------------

    @property
    def suspended(self) -> bool:
        return self.loop.suspended

    @property
    def pending_request(self) -> Optional[ClarificationRequest]:
        return self.loop.pending

    def guard(self, kind: InferenceKind) -> Union[Permit, Refusal]:
        return self.loop.guard(kind)

    def predict(self) -> Union[StateVector, Refusal]:
        """One-step-ahead prior; refused while suspended."""
        verdict = self.guard(InferenceKind.PREDICT)
        if isinstance(verdict, Refusal):
            return verdict
        if self.state is None:
            raise ZeroNorm("no observable state yet")
        hamiltonian = build_hamiltonian(self.snapshot, self.config.gains)
        return evolve(self.state, hamiltonian, self.config.dt)

    # --- observation loop ----------------------------------------------------

    def observe(self, t: int, events: Sequence[SignalEvent]) -> Optional[DivergenceSample]:
        """Advance one step: predict, ingest signals, measure divergence.

        While suspended only signal ingestion happens; prediction and
        divergence tracking resume after the clarification is answered.
        Returns the step's divergence sample, when one was computable.
        """
        prev_snapshot = self.snapshot
        prev_state = self.state

        snapshot = prev_snapshot
        for event in events:
            snapshot = apply_signal(snapshot, event)
        if snapshot.t < t:
            snapshot = Snapshot(t=t, nodes=snapshot.nodes, edges=snapshot.edges)
        self.snapshot = snapshot

        if self.loop.suspended:
            return None

        try:
            obs = build_state(snapshot)
        except ZeroNorm:
            return None
        self.state = obs
        if prev_state is None:
            return None

        hamiltonian = build_hamiltonian(prev_snapshot, self.config.gains)
        pred = evolve(prev_state, hamiltonian, self.config.dt)
        sample = divergence(pred, obs, snapshot, self.config.window.lam)
        self.trace.append(sample)
        self.baseline = update_baseline(self.baseline, sample, self.config.baseline_alpha)

        step = StepRecord(t=t, prev_snapshot=prev_snapshot, snapshot=snapshot, sample=sample)
        candidate = self.detector.update(step)
        if candidate is not None and not self._embargoed(candidate.segment, t):
            self._suspend(candidate, t)
        return sample

    def _embargoed(self, segment: frozenset[str], t: int) -> bool:
        until = self.embargo.get(segment)
        return until is not None and t < until

    def _suspend(self, candidate: RogueCandidate, t: int) -> ClarificationRequest:
        if self.state is None:
            raise ZeroNorm("cannot suspend without an observable state")
        self._request_ordinal += 1
        request_id = f"{self.actor_id}-req{self._request_ordinal:03d}"
        request = self.loop.suspend(request_id, candidate, self.snapshot, self.state, t)
        self.detections.append((t, candidate))
        self._suspended_at = t
        self._pending_candidate = candidate
        return request

    # --- clarification -------------------------------------------------------

    def answer(self, answer: ClarificationAnswer) -> RogueEpisode:
        """Resolve the pending clarification and record the episode."""
        candidate = self._pending_candidate
        new_state, resolved, request = self.loop.resolve(answer, self.state)
        self.state = new_state
        if not resolved:
            self.embargo[candidate.segment] = answer.answered_at + self.config.window.length
        # pre-resolution samples must not immediately re-trigger suspension
        self.detector.steps.clear()
        self.detector.reset_streak()
        self._episode_ordinal += 1
        episode = RogueEpisode(
            episode_id=f"{self.actor_id}-ep{self._episode_ordinal:03d}",
            actor_id=self.actor_id,
            opened_at=self._suspended_at or request.issued_at,
            closed_at=answer.answered_at,
            candidate=candidate,
            request=request,
            answer=answer,
            resolved=resolved,
            segment_relations=segment_relation_counts(self.snapshot, candidate.segment),
            window_length=self.config.window.length,
        )
        self.store.record(episode)
        self._suspended_at = None
        self._pending_candidate = None
        return episode
