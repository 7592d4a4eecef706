"""Aggregate ambiguity episodes across actors without leaking who or what.

Several simulated actors hit structurally similar ambiguity (same relation
profile in the rogue segment). Individually their episodes stay private;
collectively the pattern surfaces, keyed only by structure. Patterns seen
by fewer than min_actors distinct actors are suppressed entirely.
"""
import json

from ambigraph.collective import aggregate, alert, anonymize, pattern_to_dict
from ambigraph.engine import ActorEngine
from ambigraph.graph import RelationKind, SignalEvent
from ambigraph.loop import ClarificationAnswer


def run_actor(actor_id, store_resolved):
    """Drive one actor into a suspension and answer its clarification."""
    engine = ActorEngine(actor_id)
    events = [
        SignalEvent(t=1, target=f"n{i}", set={"relevance": 0.5, "uncertainty": 0.1})
        for i in range(6)
    ]
    engine.observe(1, events)
    hot = [
        SignalEvent(t=2, target=n, set={"relevance": 0.95, "uncertainty": 0.6, "risk": 0.9})
        for n in ("n0", "n1")
    ]
    hot.append(
        SignalEvent(t=2, target=("n0", "n1", RelationKind.CONTRADICTS), set={"weight": 0.8})
    )
    for src in ("n0", "n1"):
        for i in (2, 3, 4):
            hot.append(
                SignalEvent(
                    t=2,
                    target=(src, f"n{i}", RelationKind.TEMPORALLY_PRECEDES),
                    set={"weight": 0.85},
                )
            )
    engine.observe(2, hot)
    t = 2
    while not engine.suspended:
        t += 1
        engine.observe(t, [])
    chosen = 0 if store_resolved else None
    engine.answer(
        ClarificationAnswer(request_id=engine.pending_request.id, chosen=chosen, answered_at=t + 1)
    )
    return engine.store.all()


def main():
    episodes = []
    for actor, resolved in [("alice", True), ("bob", False), ("carol", False)]:
        eps = run_actor(actor, resolved)
        episodes.extend(eps)
        print(f"{actor}: {len(eps)} episode(s), resolved={eps[0].resolved}")

    signatures = [anonymize(e, salt="demo-deployment") for e in episodes]
    print(f"\nactor hashes: {sorted({s.actor_hash[:12] for s in signatures})}")

    patterns = aggregate(signatures, min_actors=2)
    print("\npopulation patterns (only structure survives aggregation):")
    for p in patterns:
        print(json.dumps(pattern_to_dict(p), indent=2))

    raised = alert(patterns, unresolved_threshold=0.5, actor_floor=3)
    for a in raised:
        print(f"\nALERT: {a.actor_count} actors share an ambiguity pattern, "
              f"{a.unresolved_fraction:.0%} unresolved")


if __name__ == "__main__":
    main()
