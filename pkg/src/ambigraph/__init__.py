"""Quantum-inspired ambiguity engine over dynamic signal graphs."""

from .graph import (
    EdgeFeatures,
    NodeFeatures,
    RelationKind,
    SignalEvent,
    Snapshot,
    apply_signal,
    union_basis,
    validate,
)
from .quantum import (
    Hamiltonian,
    HamiltonianGains,
    StateVector,
    activation_weights,
    align,
    build_hamiltonian,
    build_state,
    collapse,
    evolve,
    fidelity,
)
from .divergence import (
    DivergenceSample,
    ErrorWeightedOperator,
    RogueCandidate,
    RollingDetector,
    StepRecord,
    WindowConfig,
    accumulate,
    ablate,
    detect,
    divergence,
    extract_segment,
    validate_segment,
)
from .loop import (
    ClarificationAnswer,
    ClarificationRequest,
    DecoherenceLoop,
    InferenceKind,
    Interpretation,
    Permit,
    Refusal,
)
from .memory import Baseline, EpisodeStore, RogueEpisode, adaptive_threshold, update_baseline
from .collective import EpisodeSignature, PopulationPattern, aggregate, alert, anonymize
from .engine import ActorEngine, EngineConfig
from .scenario import Scenario, SimReport, case_study, generate_planted, replay

__version__ = "0.1.0"
