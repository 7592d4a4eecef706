"""Command line entry points: plant, run, serve, inspect."""
from __future__ import annotations

import json
import os
import sys

import click

from .engine import EngineConfig
from .divergence import WindowConfig
from .memory import EpisodeStore, episode_to_dict
from .scenario import (
    case_study,
    generate_planted,
    replay,
    report_to_json,
    scenario_from_json,
    scenario_to_json,
    trace_to_csv,
)


def _load_engine_config(path: str | None) -> EngineConfig:
    if not path:
        return EngineConfig()
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    window = WindowConfig(**data.get("window", {}))
    return EngineConfig(
        window=window,
        dt=data.get("dt", 1.0),
        baseline_alpha=data.get("baseline_alpha", 0.1),
    )


@click.group()
def main():
    """Ambiguity engine: scenario generation, replay, service, inspection."""


@main.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--nodes", "n_nodes", type=int, default=12, show_default=True)
@click.option("--anomaly", "anomaly_size", type=int, default=3, show_default=True)
@click.option("--onset", type=int, default=40, show_default=True)
@click.option("--duration", type=int, default=60, show_default=True)
@click.option("--out", type=click.Path(), default="scenario.json", show_default=True)
def plant(seed, n_nodes, anomaly_size, onset, duration, out):
    """Generate a seeded planted-anomaly scenario file."""
    try:
        scenario = generate_planted(
            seed=seed, n_nodes=n_nodes, anomaly_size=anomaly_size, onset=onset, duration=duration
        )
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(scenario_to_json(scenario) + "\n")
    click.echo(f"wrote {out} ({len(scenario.events)} events, seed {seed})")


@main.command()
@click.option("--scenario", "scenario_path", type=str, default=None,
              help="Scenario JSON file; omit for the built-in case replay.")
@click.option("--seed", type=int, default=None, help="Generate a planted scenario instead.")
@click.option("--config", "config_path", type=str, default=None)
@click.option("--out", "out_dir", type=click.Path(), default="report", show_default=True)
def run(scenario_path, seed, config_path, out_dir):
    """Replay a scenario and write report.json, trace.csv, episodes.jsonl."""
    if scenario_path:
        if not os.path.exists(scenario_path):
            click.echo(f"error: scenario file not found: {scenario_path}", err=True)
            sys.exit(1)
        with open(scenario_path, "r", encoding="utf-8") as fh:
            scenario = scenario_from_json(fh.read())
    elif seed is not None:
        scenario = generate_planted(seed=seed)
    else:
        scenario = case_study()
    config = _load_engine_config(config_path)
    os.makedirs(out_dir, exist_ok=True)
    log_path = os.path.join(out_dir, "episodes.jsonl")
    if os.path.exists(log_path):
        os.remove(log_path)
    report = replay(scenario, config, episode_log_path=log_path)
    with open(os.path.join(out_dir, "report.json"), "w", encoding="utf-8") as fh:
        fh.write(report_to_json(report) + "\n")
    with open(os.path.join(out_dir, "trace.csv"), "w", encoding="utf-8") as fh:
        fh.write(trace_to_csv(report))
    click.echo(
        f"replayed seed {scenario.seed}: {len(report.detections)} detection(s), "
        f"{len(report.episodes)} episode(s), final mode {report.final_mode}"
    )


@main.command()
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", type=str, default="127.0.0.1", show_default=True)
@click.option("--log", "log_path", type=str, default=None, help="Episode log path.")
def serve(port, host, log_path):
    """Run the HTTP service."""
    from .service import ServiceConfig, serve as _serve

    log_path = log_path or os.environ.get("AMBIGRAPH_LOG")
    port = int(os.environ.get("AMBIGRAPH_PORT", port))
    _serve(ServiceConfig(episode_log_path=log_path), host=host, port=port)


@main.command()
@click.option("--log", "log_path", type=str, required=True)
@click.option("--actor", type=str, default=None)
def inspect(log_path, actor):
    """Print episodes from an episode log."""
    if not os.path.exists(log_path):
        click.echo("(empty log)")
        return
    store = EpisodeStore(log_path)
    episodes = store.query(actor_id=actor)
    for ep in episodes:
        outcome = "resolved" if ep.resolved else "unresolved"
        seg = ",".join(sorted(ep.candidate.segment))
        click.echo(
            f"{ep.episode_id}\t{ep.actor_id}\t[{ep.opened_at},{ep.closed_at}]\t{seg}\t{outcome}"
        )
    click.echo(f"{len(episodes)} episode(s)")


if __name__ == "__main__":
    main()
