"""Independent numerical oracles used only by the test suite."""
from __future__ import annotations

from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from ambigraph.divergence import (
    RogueCandidate,
    StepRecord,
    WindowConfig,
    evaluate_segment,
)
from ambigraph.quantum import HamiltonianGains


def expm_taylor(matrix: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring with a Taylor series.

    Independent of the eigendecomposition route used by the library.
    """
    m = np.asarray(matrix, dtype=complex)
    norm = np.linalg.norm(m, ord=np.inf)
    squarings = max(0, int(np.ceil(np.log2(max(norm, 1e-300)))) + 1) if norm > 0.5 else 0
    scaled = m / (2.0 ** squarings)
    n = m.shape[0]
    result = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, 40):
        term = term @ scaled / k
        result = result + term
        if np.linalg.norm(term, ord=np.inf) < 1e-18:
            break
    for _ in range(squarings):
        result = result @ result
    return result


def propagator_taylor(hamiltonian: np.ndarray, dt: float) -> np.ndarray:
    return expm_taylor(-1j * np.asarray(hamiltonian, dtype=complex) * dt)


def exhaustive_best_segment(
    steps: Sequence[StepRecord],
    config: WindowConfig = WindowConfig(),
    gains: HamiltonianGains = HamiltonianGains(),
    dt: float = 1.0,
) -> RogueCandidate:
    """Brute-force search over every node subset of size <= max_segment."""
    basis = sorted(set().union(*(set(s.snapshot.nodes) for s in steps)))
    best: Optional[RogueCandidate] = None
    for size in range(1, min(config.max_segment, len(basis)) + 1):
        for combo in combinations(basis, size):
            cand = evaluate_segment(steps, frozenset(combo), {}, config, gains, dt)
            if best is None or cand.reduction > best.reduction:
                best = cand
    assert best is not None
    return best
