"""Divergence signal, error-weighted operator, and rogue segment detection.

Per step, divergence blends prediction/observation infidelity with
activation-weighted node uncertainty. High-divergence samples in a rolling
window are aggregated into a trace-one PSD operator whose dominant
eigenvector seeds a candidate segment; the candidate is accepted only if
ablating its influence (incident edges and local risk terms) reduces the
window's mean divergence by a configured fraction, and reported only after
persisting across consecutive windows.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from typing import Optional, Sequence

import numpy as np

from .errors import EmptyWindow, UnknownNode, ZeroNorm
from .graph import Snapshot
from .quantum import (
    HamiltonianGains,
    StateVector,
    align,
    build_hamiltonian,
    build_state,
    embed,
    evolve,
    fidelity,
)


@dataclass(frozen=True)
class DivergenceSample:
    t: int
    epsilon: float
    fidelity_term: float
    uncertainty_term: float
    state: StateVector  # observation-updated state at t


@dataclass(frozen=True)
class WindowConfig:
    length: int = 12
    inclusion_threshold: float = 0.3
    lam: float = 0.25
    loading_threshold: float = 0.15
    max_segment: int = 4
    reduction_threshold: float = 0.2
    persistence: int = 3

    def __post_init__(self):
        if self.length < 2:
            raise ValueError("window length must be >= 2")
        if not 0.0 <= self.inclusion_threshold <= 1.0:
            raise ValueError("inclusion_threshold outside [0, 1]")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lambda outside [0, 1]")
        if not 0.0 < self.loading_threshold <= 1.0:
            raise ValueError("loading_threshold outside (0, 1]")
        if self.max_segment < 1:
            raise ValueError("max_segment must be >= 1")
        if not 0.0 < self.reduction_threshold < 1.0:
            raise ValueError("reduction_threshold outside (0, 1)")
        if self.persistence < 1:
            raise ValueError("persistence must be >= 1")


@dataclass(frozen=True)
class ErrorWeightedOperator:
    basis: tuple[str, ...]
    matrix: np.ndarray  # Hermitian PSD, unit trace


@dataclass(frozen=True)
class RogueCandidate:
    segment: frozenset[str]
    loadings: dict[str, float]
    baseline_divergence: float
    ablated_divergence: float
    reduction: float
    windows_persisted: int = 0


@dataclass(frozen=True)
class StepRecord:
    """One engine step: the snapshot the prior was built from, the
    observation-updated snapshot, and the resulting divergence sample."""

    t: int
    prev_snapshot: Snapshot
    snapshot: Snapshot
    sample: DivergenceSample


def divergence(
    pred: StateVector, obs: StateVector, snapshot: Snapshot, lam: float = 0.25
) -> DivergenceSample:
    """Blend infidelity and activation-weighted uncertainty into epsilon."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda outside [0, 1]")
    pred_a, obs_a = align(pred, obs)
    fid = fidelity(pred_a, obs_a)
    weights = obs_a.weights()
    unc = 0.0
    for i, node_id in enumerate(obs_a.basis):
        feats = snapshot.nodes.get(node_id)
        if feats is not None:
            unc += float(weights[i]) * feats.uncertainty
    epsilon = float(np.clip((1.0 - lam) * (1.0 - fid) + lam * unc, 0.0, 1.0))
    return DivergenceSample(
        t=snapshot.t,
        epsilon=epsilon,
        fidelity_term=fid,
        uncertainty_term=unc,
        state=obs_a,
    )


def accumulate(
    samples: Sequence[DivergenceSample], config: WindowConfig = WindowConfig()
) -> ErrorWeightedOperator:
    """Divergence-weighted average of state projectors over the window."""
    included = [s for s in samples if s.epsilon >= config.inclusion_threshold]
    if not included:
        raise EmptyWindow("no sample reaches the inclusion threshold")
    basis = sorted(set().union(*(set(s.state.basis) for s in included)))
    n = len(basis)
    total = np.zeros((n, n), dtype=complex)
    z = 0.0
    for s in included:
        psi = embed(s.state, basis).amplitudes
        total += s.epsilon * np.outer(psi, psi.conj())
        z += s.epsilon
    mat = total / z
    mat = (mat + mat.conj().T) / 2.0
    return ErrorWeightedOperator(basis=tuple(basis), matrix=mat)


def extract_segment(
    op: ErrorWeightedOperator, config: WindowConfig = WindowConfig()
) -> tuple[frozenset[str], dict[str, float]]:
    """Segment of high-loading nodes from the dominant eigen-direction."""
    evals, evecs = np.linalg.eigh(op.matrix)
    dominant = evecs[:, -1]
    loadings = {n: float(abs(a) ** 2) for n, a in zip(op.basis, dominant)}
    # round before ranking so numerically-degenerate loadings tie-break
    # lexicographically instead of by eigensolver jitter
    ranked = sorted(op.basis, key=lambda n: (-round(loadings[n], 12), n))
    chosen = [n for n in ranked if loadings[n] >= config.loading_threshold]
    chosen = chosen[: config.max_segment]
    if not chosen:
        chosen = [ranked[0]]
    return frozenset(chosen), loadings


def ablate(snapshot: Snapshot, segment: frozenset[str] | set[str]) -> Snapshot:
    """Remove the segment's influence: incident edges gone, risk zeroed.

    Nodes (and their relevance/phase) are retained so the basis stays
    comparable across the ablated rerun.
    """
    missing = set(segment) - set(snapshot.nodes)
    if missing:
        raise UnknownNode(f"segment references missing nodes: {sorted(missing)}")
    nodes = {
        nid: (replace(f, risk=0.0) if nid in segment else f)
        for nid, f in snapshot.nodes.items()
    }
    edges = {
        k: f
        for k, f in snapshot.edges.items()
        if k[0] not in segment and k[1] not in segment
    }
    return Snapshot(t=snapshot.t, nodes=nodes, edges=edges)


def _rerun_epsilon(
    step: StepRecord,
    segment: Optional[frozenset[str]],
    config: WindowConfig,
    gains: HamiltonianGains,
    dt: float,
) -> Optional[float]:
    """Recompute one step's divergence, optionally under segment ablation.

    Returns None when the (ablated) snapshots cannot support state
    construction; callers skip such steps in both baseline and rerun.
    """
    prev = step.prev_snapshot
    cur = step.snapshot
    if segment is not None:
        seg_prev = frozenset(segment & set(prev.nodes))
        seg_cur = frozenset(segment & set(cur.nodes))
        prev = ablate(prev, seg_prev)
        cur = ablate(cur, seg_cur)
    try:
        prior = build_state(prev)
        pred = evolve(prior, build_hamiltonian(prev, gains), dt)
        obs = build_state(cur)
    except ZeroNorm:
        return None
    return divergence(pred, obs, cur, config.lam).epsilon


def evaluate_segment(
    steps: Sequence[StepRecord],
    segment: frozenset[str],
    loadings: dict[str, float],
    config: WindowConfig = WindowConfig(),
    gains: HamiltonianGains = HamiltonianGains(),
    dt: float = 1.0,
) -> RogueCandidate:
    """Measure a segment's divergence reduction over a window (no verdict).

    The baseline rerun recomputes each step's divergence through the same
    pipeline as the ablated rerun so the two means are comparable.
    """
    baseline_eps: list[float] = []
    ablated_eps: list[float] = []
    for step in steps:
        base = _rerun_epsilon(step, None, config, gains, dt)
        abl = _rerun_epsilon(step, segment, config, gains, dt)
        if base is None or abl is None:
            continue
        baseline_eps.append(base)
        ablated_eps.append(abl)
    if not baseline_eps:
        raise EmptyWindow("no evaluable steps in window")
    baseline = float(np.mean(baseline_eps))
    ablated = float(np.mean(ablated_eps))
    reduction = (baseline - ablated) / baseline if baseline > 0 else 0.0
    return RogueCandidate(
        segment=segment,
        loadings=loadings,
        baseline_divergence=baseline,
        ablated_divergence=ablated,
        reduction=float(reduction),
    )


def validate_segment(
    steps: Sequence[StepRecord],
    segment: frozenset[str],
    loadings: dict[str, float],
    config: WindowConfig = WindowConfig(),
    gains: HamiltonianGains = HamiltonianGains(),
    dt: float = 1.0,
) -> Optional[RogueCandidate]:
    """Ablation validation: accept iff the relative reduction meets the bar."""
    qualifying = [s for s in steps if s.sample.epsilon >= config.inclusion_threshold]
    if len(qualifying) < 2:
        raise EmptyWindow("fewer than 2 qualifying samples in window")
    candidate = evaluate_segment(steps, segment, loadings, config, gains, dt)
    if candidate.reduction >= config.reduction_threshold:
        return candidate
    return None


class RollingDetector:
    """Streaming rolling-window detector with a persistence requirement.

    Feed one StepRecord per engine step; a candidate is reported once the
    same segment has been accepted in ``persistence`` consecutive windows.
    """

    def __init__(
        self,
        config: WindowConfig = WindowConfig(),
        gains: HamiltonianGains = HamiltonianGains(),
        dt: float = 1.0,
    ):
        self.config = config
        self.gains = gains
        self.dt = dt
        self.steps: list[StepRecord] = []
        self.streak_segment: Optional[frozenset[str]] = None
        self.streak = 0
        self.last_operator: Optional[ErrorWeightedOperator] = None

    def reset_streak(self) -> None:
        self.streak_segment = None
        self.streak = 0

    def update(self, step: StepRecord) -> Optional[RogueCandidate]:
        self.steps.append(step)
        if len(self.steps) < self.config.length:
            return None
        window = self.steps[-self.config.length:]
        try:
            op = accumulate([s.sample for s in window], self.config)
            self.last_operator = op
            segment, loadings = extract_segment(op, self.config)
            accepted = validate_segment(
                window, segment, loadings, self.config, self.gains, self.dt
            )
        except EmptyWindow:
            self.reset_streak()
            return None
        if accepted is None:
            self.reset_streak()
            return None
        if segment == self.streak_segment:
            self.streak += 1
        else:
            self.streak_segment = segment
            self.streak = 1
        if self.streak >= self.config.persistence:
            return replace(accepted, windows_persisted=self.streak)
        return None


def detect(
    steps: Sequence[StepRecord],
    config: WindowConfig = WindowConfig(),
    gains: HamiltonianGains = HamiltonianGains(),
    dt: float = 1.0,
) -> Optional[RogueCandidate]:
    """Batch detection over a full step history; first persistent candidate."""
    detector = RollingDetector(config, gains, dt)
    for step in steps:
        candidate = detector.update(step)
        if candidate is not None:
            return candidate
    return None
