"""HTTP/JSON service exposing engine state and the clarification loop.

One engine per actor id, created on first signal. Per-actor mutation
(signals, answers) is serialized through a per-actor lock; reads see a
consistent engine snapshot. Prediction-bearing endpoints return a 409
refusal carrying the pending request id while the engine is suspended.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from .collective import aggregate, anonymize, pattern_to_dict
from .divergence import WindowConfig
from .engine import ActorEngine, EngineConfig
from .errors import AmbigraphError, UnknownRequest
from .graph import event_from_dict, snapshot_to_dict
from .loop import ClarificationAnswer, request_to_dict
from .memory import EpisodeStore, episode_to_dict
from .quantum import activation_weights, matrix_to_dict, state_to_dict


@dataclass
class ServiceConfig:
    episode_log_path: Optional[str] = None
    salt: str = "ambigraph-deployment"
    min_actors: int = 2
    engine: EngineConfig = field(default_factory=EngineConfig)


class ActorRegistry:
    def __init__(self, config: ServiceConfig):
        self.config = config
        self.store = EpisodeStore(config.episode_log_path)
        self._engines: dict[str, ActorEngine] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def get_or_create(self, actor_id: str) -> tuple[ActorEngine, threading.Lock]:
        with self._registry_lock:
            if actor_id not in self._engines:
                self._engines[actor_id] = ActorEngine(
                    actor_id, config=self.config.engine, store=self.store
                )
                self._locks[actor_id] = threading.Lock()
            return self._engines[actor_id], self._locks[actor_id]

    def get(self, actor_id: str) -> tuple[ActorEngine, threading.Lock]:
        with self._registry_lock:
            if actor_id not in self._engines:
                raise HTTPException(status_code=404, detail=f"unknown actor {actor_id!r}")
            return self._engines[actor_id], self._locks[actor_id]


def create_app(config: Optional[ServiceConfig] = None) -> FastAPI:
    config = config or ServiceConfig()
    registry = ActorRegistry(config)
    app = FastAPI(title="ambigraph", version="0.1.0")
    app.state.registry = registry

    @app.exception_handler(AmbigraphError)
    async def _engine_error(_request, exc: AmbigraphError):
        status = 409 if isinstance(exc, UnknownRequest) else 400
        return JSONResponse(
            status_code=status,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.get("/actors/{actor_id}/state")
    def get_state(actor_id: str):
        engine, _ = registry.get(actor_id)
        return {
            "actor_id": actor_id,
            "mode": "Suspended" if engine.suspended else "Autonomous",
            "snapshot": snapshot_to_dict(engine.snapshot),
            "state": state_to_dict(engine.state) if engine.state else None,
            "weights": activation_weights(engine.state) if engine.state else {},
        }

    @app.get("/actors/{actor_id}/graph")
    def get_graph(actor_id: str):
        engine, _ = registry.get(actor_id)
        weights = activation_weights(engine.state) if engine.state else {}
        snap = engine.snapshot
        return {
            "nodes": [
                {
                    "id": nid,
                    "weight": weights.get(nid, 0.0),
                    "relevance": f.relevance,
                    "uncertainty": f.uncertainty,
                    "risk": f.risk,
                }
                for nid, f in sorted(snap.nodes.items())
            ],
            "edges": [
                {"from": src, "to": dst, "kind": kind.value, "weight": f.weight}
                for (src, dst, kind), f in sorted(
                    snap.edges.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2].value)
                )
            ],
            "suspended": engine.suspended,
        }

    @app.get("/actors/{actor_id}/operator")
    def get_operator(actor_id: str):
        engine, _ = registry.get(actor_id)
        op = engine.detector.last_operator
        if op is None:
            basis = engine.snapshot.node_ids()
            return matrix_to_dict(basis, np.zeros((len(basis), len(basis)), dtype=complex))
        return matrix_to_dict(op.basis, op.matrix)

    @app.get("/actors/{actor_id}/divergence")
    def get_divergence(actor_id: str):
        engine, _ = registry.get(actor_id)
        return {
            "trace": [
                {
                    "t": s.t,
                    "epsilon": s.epsilon,
                    "fidelity_term": s.fidelity_term,
                    "uncertainty_term": s.uncertainty_term,
                }
                for s in engine.trace
            ],
            "detections": [
                {"t": t, "segment": sorted(c.segment), "reduction": c.reduction}
                for t, c in engine.detections
            ],
        }

    @app.get("/actors/{actor_id}/predict")
    def get_predict(actor_id: str):
        engine, lock = registry.get(actor_id)
        with lock:
            if engine.suspended:
                return JSONResponse(
                    status_code=409,
                    content={
                        "error": "Suspended",
                        "detail": "predictions suspended pending clarification",
                        "request_id": engine.pending_request.id,
                    },
                )
            if engine.state is None:
                raise HTTPException(status_code=400, detail="no observable state yet")
            predicted = engine.predict()
            return {"predicted_weights": activation_weights(predicted)}

    @app.get("/actors/{actor_id}/clarifications/pending")
    def get_pending(actor_id: str):
        engine, _ = registry.get(actor_id)
        pending = engine.pending_request
        return {"pending": [request_to_dict(pending)] if pending else []}

    @app.post("/actors/{actor_id}/clarifications/{request_id}/answer")
    def post_answer(actor_id: str, request_id: str, body: dict):
        engine, lock = registry.get(actor_id)
        with lock:
            answer = ClarificationAnswer(
                request_id=request_id,
                chosen=body.get("chosen"),
                answered_at=int(body.get("answered_at", engine.snapshot.t)),
                free_text=body.get("free_text", ""),
            )
            episode = engine.answer(answer)
            return {"episode": episode_to_dict(episode)}

    @app.post("/actors/{actor_id}/signals")
    def post_signals(actor_id: str, body: dict):
        engine, lock = registry.get_or_create(actor_id)
        events_data = body.get("events", [])
        if not isinstance(events_data, list):
            raise HTTPException(status_code=422, detail="'events' must be a list")
        with lock:
            events = [event_from_dict(e) for e in events_data]
            t = body.get("t", max((e.t for e in events), default=engine.snapshot.t + 1))
            sample = engine.observe(int(t), events)
            return {
                "t": engine.snapshot.t,
                "epsilon": sample.epsilon if sample else None,
                "mode": "Suspended" if engine.suspended else "Autonomous",
            }

    @app.get("/actors/{actor_id}/episodes")
    def get_episodes(actor_id: str):
        engine, _ = registry.get(actor_id)
        return {"episodes": [episode_to_dict(e) for e in engine.store.query(actor_id=actor_id)]}

    @app.get("/collective/patterns")
    def get_patterns():
        signatures = [anonymize(e, registry.config.salt) for e in registry.store.all()]
        patterns = aggregate(signatures, registry.config.min_actors)
        return {"patterns": [pattern_to_dict(p) for p in patterns]}

    return app


def serve(config: Optional[ServiceConfig] = None, host: str = "127.0.0.1", port: int = 8000):
    import uvicorn

    uvicorn.run(create_app(config), host=host, port=port)
