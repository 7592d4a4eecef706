"""Normalized complex state over the node basis and its Hermitian generator.

The state amplitude of a node is relevance * exp(i * phase), normalized to
unit norm. The generator couples nodes through typed edges: symmetric
relation kinds contribute real couplings of both signs, temporal precedence
contributes an imaginary (directional) coupling, and node risk feeds the
real diagonal. Prior evolution is exp(-i * H * dt) applied by Hermitian
eigendecomposition, which is exact at these dimensions.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BasisMismatch, ZeroNorm, ZeroProjection
from .graph import RelationKind, Snapshot, union_basis

NORM_TOL = 1e-9

# Sign of the real coupling contributed by each symmetric relation kind.
_SYMMETRIC_SIGN = {
    RelationKind.SUPPORTS: +1.0,
    RelationKind.DEPENDS_ON: +1.0,
    RelationKind.CONTRADICTS: -1.0,
    RelationKind.INCREASES_RISK_OF: -1.0,
}


@dataclass(frozen=True)
class StateVector:
    basis: tuple[str, ...]
    amplitudes: np.ndarray  # complex, unit norm

    def __post_init__(self):
        if len(self.basis) != len(self.amplitudes):
            raise BasisMismatch("basis and amplitude lengths differ")

    def weights(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def weight_of(self, node_id: str) -> float:
        return float(self.weights()[self.basis.index(node_id)])


@dataclass(frozen=True)
class Hamiltonian:
    basis: tuple[str, ...]
    matrix: np.ndarray  # complex, Hermitian


@dataclass(frozen=True)
class HamiltonianGains:
    """Scale factors for generator construction."""

    kappa: float = 1.0  # local (diagonal) term per unit of node risk
    coupling: float = 1.0  # global scale on edge couplings


def _normalized(vec: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(vec)
    if norm < 1e-12:
        raise ZeroNorm("cannot normalize an all-zero amplitude vector")
    return vec / norm


def build_state(snapshot: Snapshot) -> StateVector:
    """Construct the normalized state from node relevance and phase."""
    basis = tuple(snapshot.node_ids())
    if not basis:
        raise ZeroNorm("snapshot has no nodes")
    raw = np.array(
        [
            snapshot.nodes[n].relevance * np.exp(1j * snapshot.nodes[n].phase)
            for n in basis
        ],
        dtype=complex,
    )
    return StateVector(basis=basis, amplitudes=_normalized(raw))


def build_hamiltonian(
    snapshot: Snapshot, gains: HamiltonianGains = HamiltonianGains()
) -> Hamiltonian:
    basis = tuple(snapshot.node_ids())
    index = {n: i for i, n in enumerate(basis)}
    n = len(basis)
    mat = np.zeros((n, n), dtype=complex)
    for (src, dst, kind), feats in snapshot.edges.items():
        i, j = index[src], index[dst]
        w = gains.coupling * feats.weight
        if kind is RelationKind.TEMPORALLY_PRECEDES:
            mat[i, j] += 1j * w
            mat[j, i] += -1j * w
        else:
            sign = _SYMMETRIC_SIGN[kind]
            mat[i, j] += sign * w
            mat[j, i] += sign * w
    for node_id, feats in snapshot.nodes.items():
        mat[index[node_id], index[node_id]] += gains.kappa * feats.risk
    # guard against accumulated float asymmetry
    mat = (mat + mat.conj().T) / 2.0
    return Hamiltonian(basis=basis, matrix=mat)


def evolve(state: StateVector, hamiltonian: Hamiltonian, dt: float = 1.0) -> StateVector:
    """Unitary prior evolution exp(-i * H * dt) |psi>."""
    if state.basis != hamiltonian.basis:
        raise BasisMismatch("state and Hamiltonian bases differ")
    evals, evecs = np.linalg.eigh(hamiltonian.matrix)
    phases = np.exp(-1j * evals * dt)
    out = evecs @ (phases * (evecs.conj().T @ state.amplitudes))
    return StateVector(basis=state.basis, amplitudes=_normalized(out))


def embed(state: StateVector, basis: Sequence[str]) -> StateVector:
    """Re-express a state on a larger basis, zero amplitude where absent."""
    index = {n: i for i, n in enumerate(state.basis)}
    amps = np.zeros(len(basis), dtype=complex)
    for i, node_id in enumerate(basis):
        if node_id in index:
            amps[i] = state.amplitudes[index[node_id]]
    return StateVector(basis=tuple(basis), amplitudes=_normalized(amps))


def align(pred: StateVector, obs: StateVector) -> tuple[StateVector, StateVector]:
    """Put two states on their union basis (sorted), renormalized."""
    if pred.basis == obs.basis:
        return pred, obs
    basis = sorted(set(pred.basis) | set(obs.basis))
    return embed(pred, basis), embed(obs, basis)


def collapse(state: StateVector, keep: Iterable[str]) -> StateVector:
    """Project onto the subspace spanned by ``keep`` and renormalize."""
    keep_set = set(keep)
    if not keep_set:
        raise ZeroProjection("keep set is empty")
    unknown = keep_set - set(state.basis)
    if unknown:
        raise BasisMismatch(f"keep nodes not in basis: {sorted(unknown)}")
    mask = np.array([n in keep_set for n in state.basis])
    projected = np.where(mask, state.amplitudes, 0.0)
    norm = np.linalg.norm(projected)
    if norm <= 1e-12:
        raise ZeroProjection("kept subspace carries no amplitude")
    return StateVector(basis=state.basis, amplitudes=projected / norm)


def fidelity(a: StateVector, b: StateVector) -> float:
    """Squared overlap |<a|b>|^2 of two states on the same basis."""
    if a.basis != b.basis:
        raise BasisMismatch("fidelity requires aligned bases")
    overlap = np.vdot(a.amplitudes, b.amplitudes)
    return float(min(1.0, abs(overlap) ** 2))


def activation_weights(state: StateVector) -> dict[str, float]:
    return {n: float(w) for n, w in zip(state.basis, state.weights())}


# --- serialization -----------------------------------------------------------

def state_to_dict(state: StateVector) -> dict:
    return {
        "basis": list(state.basis),
        "re": [float(a.real) for a in state.amplitudes],
        "im": [float(a.imag) for a in state.amplitudes],
    }


def state_from_dict(data: dict) -> StateVector:
    amps = np.array(data["re"], dtype=float) + 1j * np.array(data["im"], dtype=float)
    return StateVector(basis=tuple(data["basis"]), amplitudes=amps)


def matrix_to_dict(basis: Sequence[str], matrix: np.ndarray) -> dict:
    return {
        "basis": list(basis),
        "re": [[float(x.real) for x in row] for row in matrix],
        "im": [[float(x.imag) for x in row] for row in matrix],
    }
