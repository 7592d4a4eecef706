"""Build a small signal graph, derive its state, and watch the prior evolve.

A handful of workplace signals become a normalized complex state; typed
relations between them become a Hermitian generator; and unitary evolution
redistributes activation weight along the couplings without ever losing
probability mass.
"""
import numpy as np

from ambigraph import (
    EdgeFeatures,
    NodeFeatures,
    RelationKind,
    Snapshot,
    activation_weights,
    build_hamiltonian,
    build_state,
    evolve,
)


def main():
    snapshot = Snapshot(
        t=0,
        nodes={
            "delivery": NodeFeatures(relevance=0.8, uncertainty=0.1),
            "morale": NodeFeatures(relevance=0.5, uncertainty=0.2),
            "roadmap": NodeFeatures(relevance=0.6, uncertainty=0.3, risk=0.4),
        },
        edges={
            ("delivery", "roadmap", RelationKind.SUPPORTS): EdgeFeatures(0.5),
            ("morale", "roadmap", RelationKind.CONTRADICTS): EdgeFeatures(0.3),
        },
    )

    state = build_state(snapshot)
    print("initial activation weights (squared amplitudes):")
    for node, w in activation_weights(state).items():
        print(f"  {node:10s} {w:.4f}")
    print(f"  total      {sum(activation_weights(state).values()):.9f}")

    hamiltonian = build_hamiltonian(snapshot)
    print("\ngenerator (real part):")
    print(np.array_str(hamiltonian.matrix.real, precision=3, suppress_small=True))

    print("\nevolving the prior in steps of dt=0.5:")
    for step in range(1, 6):
        state = evolve(state, hamiltonian, dt=0.5)
        weights = activation_weights(state)
        bar = "".join(f"  {node}={weights[node]:.3f}" for node in sorted(weights))
        norm = float(np.vdot(state.amplitudes, state.amplitudes).real)
        print(f"  t={0.5 * step:.1f}{bar}  |  norm={norm:.9f}")


if __name__ == "__main__":
    main()
