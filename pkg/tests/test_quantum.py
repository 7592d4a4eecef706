import math

import numpy as np
import pytest

from ambigraph.errors import BasisMismatch, ZeroNorm, ZeroProjection
from ambigraph.graph import EdgeFeatures, NodeFeatures, RelationKind, Snapshot
from ambigraph.quantum import (
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
from oracles import propagator_taylor


def snap(nodes, edges=None):
    return Snapshot(t=0, nodes=nodes, edges=edges or {})


def state(basis, amps):
    vec = np.array(amps, dtype=complex)
    return StateVector(basis=tuple(basis), amplitudes=vec / np.linalg.norm(vec))


def random_snapshot(rng, n):
    ids = [f"n{i:02d}" for i in range(n)]
    nodes = {
        i: NodeFeatures(
            relevance=float(rng.uniform(0.05, 1.0)),
            uncertainty=float(rng.uniform(0, 1)),
            risk=float(rng.uniform(0, 1)),
            phase=float(rng.uniform(-math.pi, math.pi)),
        )
        for i in ids
    }
    edges = {}
    kinds = list(RelationKind)
    for _ in range(rng.integers(0, 2 * n) if n >= 2 else 0):
        a, b = rng.choice(ids, size=2, replace=False)
        kind = kinds[rng.integers(len(kinds))]
        edges[(str(a), str(b), kind)] = EdgeFeatures(weight=float(rng.uniform(0.05, 1.0)))
    return snap(nodes, edges)


class TestBuildState:
    def test_two_equal_nodes(self):
        s = build_state(snap({"A": NodeFeatures(relevance=1), "B": NodeFeatures(relevance=1)}))
        assert np.allclose(s.amplitudes, [1 / math.sqrt(2), 1 / math.sqrt(2)])

    def test_single_node_forced_to_unit(self):
        s = build_state(snap({"A": NodeFeatures(relevance=0.3)}))
        assert np.allclose(s.amplitudes, [1.0])

    def test_hand_normalization(self):
        # relevances (1, 2, 2): sum of squares 9, weights (1/9, 4/9, 4/9)
        s = build_state(
            snap(
                {
                    "A": NodeFeatures(relevance=1),
                    "B": NodeFeatures(relevance=2),
                    "C": NodeFeatures(relevance=2),
                }
            )
        )
        assert np.allclose(s.weights(), [1 / 9, 4 / 9, 4 / 9])

    def test_phase_carried(self):
        s = build_state(snap({"A": NodeFeatures(relevance=1, phase=math.pi / 2)}))
        assert np.allclose(s.amplitudes, [1j])

    def test_zero_relevance_raises(self):
        with pytest.raises(ZeroNorm):
            build_state(snap({"A": NodeFeatures(relevance=0)}))

    def test_basis_is_lexicographic(self):
        s = build_state(snap({"B": NodeFeatures(relevance=1), "A": NodeFeatures(relevance=1)}))
        assert s.basis == ("A", "B")

    def test_unit_norm_random(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            s = build_state(random_snapshot(rng, int(rng.integers(1, 20))))
            assert abs(np.vdot(s.amplitudes, s.amplitudes).real - 1) <= 1e-9


class TestBuildHamiltonian:
    def test_empty_graph_zero_matrix(self):
        h = build_hamiltonian(snap({"A": NodeFeatures(), "B": NodeFeatures()}))
        assert np.allclose(h.matrix, 0)

    def test_supports_edge_symmetric_full_weight(self):
        h = build_hamiltonian(
            snap(
                {"A": NodeFeatures(), "B": NodeFeatures()},
                {("A", "B", RelationKind.SUPPORTS): EdgeFeatures(1.0)},
            )
        )
        assert np.allclose(h.matrix, [[0, 1], [1, 0]])

    def test_temporal_precedence_imaginary(self):
        h = build_hamiltonian(
            snap(
                {"A": NodeFeatures(), "B": NodeFeatures()},
                {("A", "B", RelationKind.TEMPORALLY_PRECEDES): EdgeFeatures(1.0)},
            )
        )
        assert np.allclose(h.matrix, [[0, 1j], [-1j, 0]])

    def test_contradicts_negative_coupling(self):
        h = build_hamiltonian(
            snap(
                {"A": NodeFeatures(), "B": NodeFeatures()},
                {("A", "B", RelationKind.CONTRADICTS): EdgeFeatures(0.5)},
            )
        )
        assert np.allclose(h.matrix, [[0, -0.5], [-0.5, 0]])

    def test_risk_on_diagonal(self):
        h = build_hamiltonian(
            snap({"A": NodeFeatures(risk=0.7), "B": NodeFeatures()}),
            HamiltonianGains(kappa=2.0),
        )
        assert np.allclose(h.matrix, [[1.4, 0], [0, 0]])

    def test_multiple_edges_sum(self):
        h = build_hamiltonian(
            snap(
                {"A": NodeFeatures(), "B": NodeFeatures()},
                {
                    ("A", "B", RelationKind.SUPPORTS): EdgeFeatures(0.5),
                    ("B", "A", RelationKind.CONTRADICTS): EdgeFeatures(0.2),
                },
            )
        )
        assert np.allclose(h.matrix, [[0, 0.3], [0.3, 0]])

    def test_hermitian_for_random_snapshots(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            h = build_hamiltonian(random_snapshot(rng, int(rng.integers(2, 16))))
            assert np.max(np.abs(h.matrix - h.matrix.conj().T)) <= 1e-10


class TestEvolve:
    def test_zero_hamiltonian_identity(self):
        s = state(["A", "B"], [0.6, 0.8])
        h = Hamiltonian(basis=("A", "B"), matrix=np.zeros((2, 2), dtype=complex))
        out = evolve(s, h, 1.0)
        assert np.allclose(out.amplitudes, s.amplitudes)

    def test_diagonal_preserves_weights(self):
        s = state(["A", "B"], [0.6, 0.8])
        h = Hamiltonian(basis=("A", "B"), matrix=np.diag([0.3, 1.2]).astype(complex))
        out = evolve(s, h, 2.5)
        assert np.allclose(out.weights(), s.weights())

    def test_quarter_period_swap(self):
        # H = [[0,1],[1,0]], dt = pi/2: (1,0) -> (0,-i); checked against the
        # Taylor-series propagator oracle
        h_mat = np.array([[0, 1], [1, 0]], dtype=complex)
        h = Hamiltonian(basis=("A", "B"), matrix=h_mat)
        s = state(["A", "B"], [1, 0])
        out = evolve(s, h, math.pi / 2)
        assert np.allclose(out.amplitudes, [0, -1j], atol=1e-12)
        oracle = propagator_taylor(h_mat, math.pi / 2) @ s.amplitudes
        assert np.allclose(out.amplitudes, oracle, atol=1e-10)

    def test_basis_mismatch(self):
        s = state(["A", "B"], [1, 0])
        h = Hamiltonian(basis=("A", "C"), matrix=np.zeros((2, 2), dtype=complex))
        with pytest.raises(BasisMismatch):
            evolve(s, h)

    def test_norm_preserved_random(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            n = int(rng.integers(2, 65))
            a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            h = Hamiltonian(basis=tuple(f"n{i}" for i in range(n)), matrix=(a + a.conj().T) / 2)
            vec = rng.normal(size=n) + 1j * rng.normal(size=n)
            s = StateVector(basis=h.basis, amplitudes=vec / np.linalg.norm(vec))
            dt = float(rng.uniform(0.01, 10))
            out = evolve(s, h, dt)
            assert abs(np.linalg.norm(out.amplitudes) - 1) <= 1e-9
            back = evolve(out, h, -dt)
            assert np.max(np.abs(back.amplitudes - s.amplitudes)) <= 1e-8


class TestAlign:
    def test_identical_bases_unchanged(self):
        a = state(["A", "B"], [1, 1])
        b = state(["A", "B"], [1, 0])
        out_a, out_b = align(a, b)
        assert out_a is a and out_b is b

    def test_zero_padding(self):
        a = state(["A"], [1])
        b = state(["A", "B"], [0.6, 0.8])
        out_a, out_b = align(a, b)
        assert out_a.basis == ("A", "B")
        assert np.allclose(out_a.amplitudes, [1, 0])
        assert np.allclose(out_b.amplitudes, b.amplitudes)

    def test_disjoint(self):
        a = state(["A"], [1])
        b = state(["B"], [1])
        out_a, out_b = align(a, b)
        assert out_a.basis == out_b.basis == ("A", "B")
        assert np.allclose(out_a.amplitudes, [1, 0])
        assert np.allclose(out_b.amplitudes, [0, 1])


class TestCollapse:
    def test_full_basis_identity(self):
        s = state(["A", "B"], [0.6, 0.8])
        out = collapse(s, {"A", "B"})
        assert np.allclose(out.amplitudes, s.amplitudes)

    def test_uniform_two_node(self):
        s = state(["A", "B"], [1, 1])
        out = collapse(s, {"A"})
        assert np.allclose(out.weights(), [1, 0])

    def test_renormalizes_kept_weights(self):
        s = state(["A", "B", "C"], [1, 2, 2])  # weights 1/9, 4/9, 4/9
        out = collapse(s, {"B", "C"})
        assert np.allclose(out.weights(), [0, 0.5, 0.5])

    def test_zero_projection_raises(self):
        s = state(["A", "B"], [1, 0])
        with pytest.raises(ZeroProjection):
            collapse(s, {"B"})

    def test_idempotent(self):
        s = state(["A", "B", "C"], [1, 2, 2])
        once = collapse(s, {"B", "C"})
        twice = collapse(once, {"B", "C"})
        assert np.allclose(once.amplitudes, twice.amplitudes)


class TestFidelity:
    def test_self_is_one(self):
        s = state(["A", "B"], [0.6, 0.8])
        assert fidelity(s, s) == pytest.approx(1.0)

    def test_orthogonal_is_zero(self):
        assert fidelity(state(["A", "B"], [1, 0]), state(["A", "B"], [0, 1])) == 0.0

    def test_half_overlap(self):
        a = state(["A", "B"], [1, 0])
        b = state(["A", "B"], [1, 1])
        assert fidelity(a, b) == pytest.approx(0.5)

    def test_basis_mismatch(self):
        with pytest.raises(BasisMismatch):
            fidelity(state(["A"], [1]), state(["B"], [1]))

    def test_global_phase_invariance(self):
        rng = np.random.default_rng(3)
        a = state(["A", "B", "C"], rng.normal(size=3) + 1j * rng.normal(size=3))
        b = state(["A", "B", "C"], rng.normal(size=3) + 1j * rng.normal(size=3))
        phased = StateVector(basis=b.basis, amplitudes=b.amplitudes * np.exp(1j * 1.234))
        assert fidelity(a, phased) == pytest.approx(fidelity(a, b), abs=1e-12)
        assert np.allclose(phased.weights(), b.weights())


def test_unitarity_against_taylor_oracle():
    rng = np.random.default_rng(4)
    for _ in range(25):
        n = int(rng.integers(2, 9))
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        h = (a + a.conj().T) / 2
        dt = float(rng.uniform(0.1, 3.0))
        evals, evecs = np.linalg.eigh(h)
        u = evecs @ np.diag(np.exp(-1j * evals * dt)) @ evecs.conj().T
        assert np.max(np.abs(u.conj().T @ u - np.eye(n))) <= 1e-9
        assert np.max(np.abs(u - propagator_taylor(h, dt))) <= 1e-8


def test_activation_weights_mapping():
    s = state(["A", "B"], [1, 2])
    w = activation_weights(s)
    assert w["A"] == pytest.approx(0.2)
    assert w["B"] == pytest.approx(0.8)
