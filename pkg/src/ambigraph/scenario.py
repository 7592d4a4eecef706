"""Deterministic scenario generation and replay.

Two scenario families ship with the engine: a seeded planted-anomaly
benchmark (ground truth known, used for recall/latency measurement) and a
scripted three-month case replay in which ambiguity accumulates around
schedule slippage, guarded communication about future plans, and an
unresolved IP boundary, is first left unresolved by the operator, and is
finally resolved at an explicit collapse step.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .divergence import RogueCandidate
from .engine import ActorEngine, EngineConfig
from .errors import AmbigraphError
from .graph import (
    EdgeFeatures,
    NodeFeatures,
    RelationKind,
    SignalEvent,
    Snapshot,
    event_from_dict,
    event_to_dict,
    snapshot_from_dict,
    snapshot_to_dict,
)
from .loop import ClarificationAnswer
from .memory import EpisodeStore


@dataclass(frozen=True)
class ScriptedAnswer:
    """How the simulated operator answers the n-th clarification request."""

    chosen: Optional[int]  # option index, None = unresolved
    delay: Optional[int] = None  # steps after suspension; default 1
    at: Optional[int] = None  # absolute step; overrides delay
    free_text: str = ""


@dataclass(frozen=True)
class GroundTruth:
    segment: frozenset[str]
    onset: int
    duration: int


@dataclass(frozen=True)
class Scenario:
    seed: int
    initial: Snapshot
    events: tuple[SignalEvent, ...]
    scripted_answers: dict[int, ScriptedAnswer] = field(default_factory=dict)
    ground_truth: Optional[GroundTruth] = None
    collapse_event: Optional[int] = None
    total_steps: int = 0


@dataclass(frozen=True)
class SimReport:
    scenario_seed: int
    trace: tuple[tuple[int, float, float, float], ...]  # (t, eps, fid, unc)
    detections: tuple[tuple[int, tuple[str, ...], float, int], ...]
    episodes: tuple[str, ...]
    permits: tuple[int, ...]  # steps at which a prediction was permitted
    refusals: tuple[int, ...]  # steps at which prediction was refused
    suspension_intervals: tuple[tuple[int, int], ...]  # (opened_at, closed_at)
    resolved_flags: tuple[bool, ...]
    detection_latency: Optional[int]
    segment_jaccard: Optional[float]
    final_mode: str


# --- planted-anomaly benchmark ----------------------------------------------

def generate_planted(
    seed: int,
    n_nodes: int = 12,
    anomaly_size: int = 3,
    onset: int = 40,
    duration: int = 60,
    tail: int = 24,
) -> Scenario:
    """Synthesize a background stream with a planted divergence source.

    Outside [onset, onset+duration) predicted and observed states track
    each other closely. Inside the interval, the planted segment acquires
    strong local risk terms and strong couplings, so the prior mispredicts
    while observed features hold steady; ablating exactly that segment
    restores agreement.
    """
    if anomaly_size > n_nodes:
        raise ValueError("anomaly_size exceeds n_nodes")
    if onset < 1:
        raise ValueError("onset must be >= 1")
    rng = np.random.default_rng(seed)
    ids = [f"v{i:02d}" for i in range(n_nodes)]
    planted = sorted(rng.choice(ids, size=anomaly_size, replace=False).tolist())
    background = [n for n in ids if n not in planted]

    nodes = {
        nid: NodeFeatures(
            relevance=0.5 + 0.05 * float(rng.uniform(-1, 1)),
            uncertainty=0.1,
            risk=0.0,
            phase=0.0,
        )
        for nid in ids
    }
    edges = {}
    for _ in range(n_nodes):
        a, b = rng.choice(ids, size=2, replace=False)
        edges[(str(a), str(b), RelationKind.SUPPORTS)] = EdgeFeatures(
            weight=0.03 + 0.02 * float(rng.uniform())
        )
    initial = Snapshot(t=0, nodes=nodes, edges=edges)

    total = onset + duration + tail
    events: list[SignalEvent] = []
    anomaly_edges: list[tuple[str, str, RelationKind]] = []
    for t in range(1, total + 1):
        active = duration > 0 and onset <= t < onset + duration
        # background drift on nodes outside the active anomaly
        pool = background if active else ids
        for nid in rng.choice(pool, size=2, replace=False):
            events.append(
                SignalEvent(
                    t=t,
                    target=str(nid),
                    add={"relevance": 0.02 * float(rng.uniform(-1, 1))},
                    provenance="Behavioral",
                )
            )
        if duration > 0 and t == onset:
            for i, nid in enumerate(planted):
                events.append(
                    SignalEvent(
                        t=t,
                        target=nid,
                        set={"relevance": 0.95, "uncertainty": 0.6, "risk": 0.9},
                        provenance="Internal",
                    )
                )
                partner = planted[(i + 1) % len(planted)]
                if partner != nid:
                    key = (nid, partner, RelationKind.CONTRADICTS)
                    anomaly_edges.append(key)
                    events.append(
                        SignalEvent(t=t, target=key, set={"weight": 0.8}, provenance="Internal")
                    )
                # imaginary couplings: the prior rotates hard away from the
                # steady observation, and ablation removes all of it
                for off in range(3):
                    tgt = background[(3 * i + off) % len(background)]
                    key = (nid, tgt, RelationKind.TEMPORALLY_PRECEDES)
                    anomaly_edges.append(key)
                    events.append(
                        SignalEvent(t=t, target=key, set={"weight": 0.85}, provenance="Internal")
                    )
        if duration > 0 and t == onset + duration:
            for nid in planted:
                events.append(
                    SignalEvent(
                        t=t,
                        target=nid,
                        set={"relevance": 0.5, "uncertainty": 0.1, "risk": 0.0},
                        provenance="Internal",
                    )
                )
            for key in anomaly_edges:
                events.append(
                    SignalEvent(t=t, target=key, set={"weight": 0.0}, provenance="Internal")
                )
    ground_truth = (
        GroundTruth(segment=frozenset(planted), onset=onset, duration=duration)
        if duration > 0
        else None
    )
    # replayed unanswered, suspensions would stall the run; script the answers
    answers = {k: ScriptedAnswer(chosen=0, delay=1) for k in range(1, 9)}
    return Scenario(
        seed=seed,
        initial=initial,
        events=tuple(events),
        scripted_answers=answers,
        ground_truth=ground_truth,
        collapse_event=None,
        total_steps=total,
    )


# --- scripted case replay ----------------------------------------------------

CASE_SEGMENT = frozenset({"ip_boundary", "plan_openness", "schedule_adherence"})


def case_study() -> Scenario:
    """Scripted ~90-step replay of a prolonged-ambiguity episode.

    Ambiguity accumulates around schedule adherence, openness about future
    plans, and an IP boundary from step 30; the first clarification is left
    unresolved; the ambiguity is explicitly resolved at step 85.
    """
    rng = np.random.default_rng(20250830)
    node_feats = {
        "delivery_commitments": NodeFeatures(0.6, 0.1, 0.0, 0.0),
        "interaction_patterns": NodeFeatures(0.55, 0.1, 0.0, 0.0),
        "ip_boundary": NodeFeatures(0.45, 0.15, 0.0, 0.0),
        "legal_patent_status": NodeFeatures(0.4, 0.1, 0.0, 0.0),
        "org_context": NodeFeatures(0.5, 0.1, 0.0, 0.0),
        "plan_openness": NodeFeatures(0.5, 0.15, 0.0, 0.0),
        "schedule_adherence": NodeFeatures(0.55, 0.1, 0.0, 0.0),
        "side_project": NodeFeatures(0.4, 0.2, 0.0, 0.0),
    }
    edges = {
        ("delivery_commitments", "org_context", RelationKind.SUPPORTS): EdgeFeatures(0.1),
        ("schedule_adherence", "delivery_commitments", RelationKind.SUPPORTS): EdgeFeatures(0.1),
        ("side_project", "ip_boundary", RelationKind.INCREASES_RISK_OF): EdgeFeatures(0.1),
        ("plan_openness", "interaction_patterns", RelationKind.DEPENDS_ON): EdgeFeatures(0.08),
        ("legal_patent_status", "org_context", RelationKind.SUPPORTS): EdgeFeatures(0.08),
    }
    initial = Snapshot(t=0, nodes=node_feats, edges=edges)
    segment = sorted(CASE_SEGMENT)
    bystanders = sorted(set(node_feats) - CASE_SEGMENT)

    events: list[SignalEvent] = []
    onset, collapse_at, total = 30, 85, 90
    strong_edges = [
        ("plan_openness", "ip_boundary", RelationKind.CONTRADICTS),
        ("schedule_adherence", "plan_openness", RelationKind.CONTRADICTS),
        ("side_project", "ip_boundary", RelationKind.INCREASES_RISK_OF),
        ("ip_boundary", "org_context", RelationKind.TEMPORALLY_PRECEDES),
        ("ip_boundary", "legal_patent_status", RelationKind.TEMPORALLY_PRECEDES),
        ("plan_openness", "interaction_patterns", RelationKind.TEMPORALLY_PRECEDES),
        ("plan_openness", "side_project", RelationKind.TEMPORALLY_PRECEDES),
        ("schedule_adherence", "delivery_commitments", RelationKind.TEMPORALLY_PRECEDES),
        ("schedule_adherence", "org_context", RelationKind.TEMPORALLY_PRECEDES),
    ]
    for t in range(1, total + 1):
        pool = bystanders if t >= onset else sorted(node_feats)
        for nid in rng.choice(pool, size=2, replace=False):
            events.append(
                SignalEvent(
                    t=t,
                    target=str(nid),
                    add={"relevance": 0.015 * float(rng.uniform(-1, 1))},
                    provenance="Behavioral",
                )
            )
        if t == onset:
            for nid in segment:
                events.append(
                    SignalEvent(
                        t=t,
                        target=nid,
                        set={"relevance": 0.95, "uncertainty": 0.65, "risk": 0.85},
                        provenance="Contextual",
                    )
                )
            for key in strong_edges:
                events.append(
                    SignalEvent(t=t, target=key, set={"weight": 0.8}, provenance="Contextual")
                )
        if t == collapse_at + 1:
            # explicit statement of intent: ambiguity gone, signals calm
            for nid in segment:
                events.append(
                    SignalEvent(
                        t=t,
                        target=nid,
                        set={"relevance": 0.5, "uncertainty": 0.1, "risk": 0.0},
                        provenance="Contextual",
                    )
                )
            for key in strong_edges:
                events.append(
                    SignalEvent(t=t, target=key, set={"weight": 0.0}, provenance="Contextual")
                )
    answers = {
        1: ScriptedAnswer(chosen=None, delay=3, free_text="still ambiguous"),
        2: ScriptedAnswer(chosen=0, at=collapse_at, free_text="intent stated explicitly"),
    }
    return Scenario(
        seed=20250830,
        initial=initial,
        events=tuple(events),
        scripted_answers=answers,
        ground_truth=GroundTruth(segment=CASE_SEGMENT, onset=onset, duration=collapse_at - onset),
        collapse_event=collapse_at,
        total_steps=total,
    )


# --- replay -------------------------------------------------------------------

class ReplayError(AmbigraphError):
    def __init__(self, step: int, cause: Exception):
        super().__init__(f"replay failed at step {step}: {cause}")
        self.step = step
        self.cause = cause


def replay(
    scenario: Scenario,
    config: EngineConfig = EngineConfig(),
    episode_log_path: Optional[str] = None,
) -> SimReport:
    """Feed a scenario through a fresh engine, step by step."""
    store = EpisodeStore(episode_log_path)
    engine = ActorEngine("sim", initial=scenario.initial, config=config, store=store)
    by_t: dict[int, list[SignalEvent]] = {}
    for event in scenario.events:
        by_t.setdefault(event.t, []).append(event)
    total = scenario.total_steps or (max(by_t) if by_t else 0)

    permits: list[int] = []
    refusals: list[int] = []
    intervals: list[tuple[int, int]] = []
    suspension_count = 0
    queued: Optional[tuple[int, ClarificationAnswer]] = None
    opened_at: Optional[int] = None

    for t in range(1, total + 1):
        try:
            if queued is not None and engine.suspended and t >= queued[0]:
                due_answer = queued[1]
                engine.answer(
                    ClarificationAnswer(
                        request_id=engine.pending_request.id,
                        chosen=due_answer.chosen,
                        answered_at=t,
                        free_text=due_answer.free_text,
                    )
                )
                intervals.append((opened_at, t))
                queued = None
                opened_at = None
            if engine.suspended:
                refusals.append(t)
            else:
                permits.append(t)
            was_suspended = engine.suspended
            engine.observe(t, by_t.get(t, []))
            if engine.suspended and not was_suspended:
                suspension_count += 1
                opened_at = t
                scripted = scenario.scripted_answers.get(suspension_count)
                if scripted is not None:
                    due = scripted.at if scripted.at is not None else t + (scripted.delay or 1)
                    queued = (due, scripted)
        except AmbigraphError as exc:
            raise ReplayError(t, exc) from exc

    detections = tuple(
        (t, tuple(sorted(c.segment)), round(c.reduction, 12), c.windows_persisted)
        for t, c in engine.detections
    )
    episodes = engine.store.all()
    latency = None
    jaccard = None
    if scenario.ground_truth is not None and detections:
        first_t, first_seg, _, _ = detections[0]
        latency = first_t - scenario.ground_truth.onset
        gt = scenario.ground_truth.segment
        seg = set(first_seg)
        jaccard = len(seg & gt) / len(seg | gt)
    return SimReport(
        scenario_seed=scenario.seed,
        trace=tuple(
            (s.t, round(s.epsilon, 12), round(s.fidelity_term, 12), round(s.uncertainty_term, 12))
            for s in engine.trace
        ),
        detections=detections,
        episodes=tuple(e.episode_id for e in episodes),
        permits=tuple(permits),
        refusals=tuple(refusals),
        suspension_intervals=tuple(intervals),
        resolved_flags=tuple(e.resolved for e in episodes),
        detection_latency=latency,
        segment_jaccard=jaccard,
        final_mode="Suspended" if engine.suspended else "Autonomous",
    )


# --- serialization -----------------------------------------------------------

def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "seed": scenario.seed,
        "initial": snapshot_to_dict(scenario.initial),
        "events": [event_to_dict(e) for e in scenario.events],
        "scripted_answers": {
            str(k): {"chosen": a.chosen, "delay": a.delay, "at": a.at, "free_text": a.free_text}
            for k, a in sorted(scenario.scripted_answers.items())
        },
        "ground_truth": (
            {
                "segment": sorted(scenario.ground_truth.segment),
                "onset": scenario.ground_truth.onset,
                "duration": scenario.ground_truth.duration,
            }
            if scenario.ground_truth
            else None
        ),
        "collapse_event": scenario.collapse_event,
        "total_steps": scenario.total_steps,
    }


def scenario_from_dict(data: dict) -> Scenario:
    gt = data.get("ground_truth")
    return Scenario(
        seed=int(data["seed"]),
        initial=snapshot_from_dict(data["initial"]),
        events=tuple(event_from_dict(e) for e in data["events"]),
        scripted_answers={
            int(k): ScriptedAnswer(
                chosen=v.get("chosen"),
                delay=v.get("delay"),
                at=v.get("at"),
                free_text=v.get("free_text", ""),
            )
            for k, v in data.get("scripted_answers", {}).items()
        },
        ground_truth=(
            GroundTruth(
                segment=frozenset(gt["segment"]), onset=gt["onset"], duration=gt["duration"]
            )
            if gt
            else None
        ),
        collapse_event=data.get("collapse_event"),
        total_steps=int(data.get("total_steps", 0)),
    )


def scenario_to_json(scenario: Scenario) -> str:
    return json.dumps(scenario_to_dict(scenario), sort_keys=True, separators=(",", ":"))


def scenario_from_json(text: str) -> Scenario:
    return scenario_from_dict(json.loads(text))


def report_to_dict(report: SimReport) -> dict:
    return {
        "scenario_seed": report.scenario_seed,
        "trace": [list(row) for row in report.trace],
        "detections": [
            {"t": t, "segment": list(seg), "reduction": red, "windows_persisted": wp}
            for t, seg, red, wp in report.detections
        ],
        "episodes": list(report.episodes),
        "permits": list(report.permits),
        "refusals": list(report.refusals),
        "suspension_intervals": [list(iv) for iv in report.suspension_intervals],
        "resolved_flags": list(report.resolved_flags),
        "detection_latency": report.detection_latency,
        "segment_jaccard": report.segment_jaccard,
        "final_mode": report.final_mode,
    }


def report_to_json(report: SimReport) -> str:
    return json.dumps(report_to_dict(report), sort_keys=True, separators=(",", ":"))


def trace_to_csv(report: SimReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "epsilon", "fidelity_term", "uncertainty_term"])
    for row in report.trace:
        writer.writerow(row)
    return buf.getvalue()
