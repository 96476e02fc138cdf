"""autodo command line: headless runs, analytics, reports, server, worker."""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .analytics import (
    agent_tour,
    cluster_states,
    clustered_matrix,
    graph_layout,
    state_transition_matrix,
    action_transition_matrix,
    temporal_graph,
)
from .engine import (
    config_from_document,
    default_schemas,
    read_protocols,
    search,
    write_protocols,
)
from .gymspec import generate_source, parse_spec, serialize, validate
from .rules import bucketize, concatenate_evaluations, coverage_stats, induce_rules


@click.group()
def main() -> None:
    """Desk-scale automated decision optimization."""


def _load_gym(path: str):
    return parse_spec(Path(path).read_text(encoding="utf-8"))


def _write_json(path: str, document: dict) -> None:
    Path(path).write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")


@main.command("validate")
@click.option("--gym", "gym_path", required=True, type=click.Path(exists=True))
def validate_cmd(gym_path: str) -> None:
    """Validate a gym document; exits nonzero on findings."""
    spec = _load_gym(gym_path)
    report = validate(spec)
    if report.ok:
        click.echo(f"{spec.name}: OK")
        return
    for finding in report.findings:
        click.echo(f"{finding.code} at {finding.path}: {finding.message}")
    sys.exit(1)


@main.command("codegen")
@click.option("--gym", "gym_path", required=True, type=click.Path(exists=True))
@click.option("--backend", default="python", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def codegen_cmd(gym_path: str, backend: str, out_path: str) -> None:
    """Generate environment source from a gym document."""
    source = generate_source(_load_gym(gym_path), backend)
    Path(out_path).write_text(source, encoding="utf-8")
    click.echo(f"wrote {out_path}")


@main.command("run")
@click.option("--gym", "gym_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--report/--no-report", default=True, show_default=True,
              help="Also render figures for the run.")
def run_cmd(gym_path: str, config_path: str, out_dir: str, seed: int | None, report: bool) -> None:
    """Headless search: train, evaluate, and rank every candidate."""
    from dataclasses import replace

    spec = _load_gym(gym_path)
    config = config_from_document(json.loads(Path(config_path).read_text(encoding="utf-8")))
    if seed is not None:
        config = replace(config, seed=seed)

    def echo_sink(kind: str, payload: dict) -> None:
        if kind == "candidate_started":
            click.echo(f"  {payload['candidate_id']} {payload['agent']} started")
        elif kind == "candidate_finished":
            score = payload.get("rank_score")
            shown = f"{score:.3f}" if score is not None else "failed"
            click.echo(f"  {payload['candidate_id']} finished: {shown}")

    result = search(spec, config, default_schemas(), event_sink=echo_sink)

    out = Path(out_dir)
    (out / "protocols").mkdir(parents=True, exist_ok=True)
    _write_json(out / "result.json", result.to_document())
    for candidate in result.top:
        write_protocols(
            result.protocols[candidate.candidate_id],
            out / "protocols" / f"{candidate.candidate_id}.csv",
        )

    if report:
        _render_run_report(result, out)
    click.echo(f"top-{len(result.top)}: {[c.candidate_id for c in result.top]}")
    click.echo(f"results in {out}")


def _render_run_report(result, out: Path) -> None:
    from .report import layout_figure, leaderboard, matrix_heatmap, rules_figure

    figures = out / "figures"
    figures.mkdir(parents=True, exist_ok=True)
    leaderboard([c.to_document() for c in result.candidates], figures / "leaderboard.png")
    best = result.top[0]
    protocols = result.protocols[best.candidate_id]
    matrix = state_transition_matrix(protocols)
    matrix_heatmap(matrix, figures / "state_matrix.png", title=f"{best.candidate_id} states")
    graph = graph_layout(matrix, seed=0)
    tour = agent_tour(protocols[0], graph)
    layout_figure(graph, figures / "transition_graph.png", tour=tour, counts=matrix)
    table = concatenate_evaluations(protocols, (0, max(p.episode_index for p in protocols)))
    try:
        data = bucketize(table, "action")
        ruleset = induce_rules(data)
        rules_figure(ruleset, figures / "rules.png", title=f"{best.candidate_id} policy rules")
        _write_json(out / "rules.json", ruleset.to_document())
    except Exception as exc:  # rules are best-effort in the report
        click.echo(f"  (rules skipped: {exc})")


@main.group("analyze")
def analyze() -> None:
    """Derive matrices, graphs, clusterings, and rules from protocol CSVs."""


@analyze.command("matrix")
@click.option("--protocol", "protocol_path", required=True, type=click.Path(exists=True))
@click.option("--kind", type=click.Choice(["state", "action"]), default="state", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--plot", "plot_path", type=click.Path(), default=None)
def matrix_cmd(protocol_path: str, kind: str, out_path: str, plot_path: str | None) -> None:
    """Aggregate transition counts between states or actions."""
    protocols = read_protocols(protocol_path)
    build = state_transition_matrix if kind == "state" else action_transition_matrix
    matrix = build(protocols)
    _write_json(out_path, matrix.to_document())
    if plot_path:
        from .report import matrix_heatmap

        matrix_heatmap(matrix, plot_path)
    click.echo(f"{matrix.total} transitions over {len(matrix.labels)} {kind}s -> {out_path}")


@analyze.command("graph")
@click.option("--protocol", "protocol_path", required=True, type=click.Path(exists=True))
@click.option("--dims", type=click.Choice(["2", "3"]), default="2", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--episode", type=int, default=None, help="Episode for the tour overlay.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--plot", "plot_path", type=click.Path(), default=None)
def graph_cmd(protocol_path, dims, seed, episode, out_path, plot_path) -> None:
    """Stress-based layout of the aggregated transition graph plus agent tour."""
    protocols = read_protocols(protocol_path)
    matrix = state_transition_matrix(protocols)
    graph = graph_layout(matrix, dims=int(dims), seed=seed)
    chosen = protocols[0] if episode is None else next(
        p for p in protocols if p.episode_index == episode
    )
    tour = agent_tour(chosen, graph)
    document = graph.to_document()
    document["tour"] = [{"from": a, "to": b, "weight": w} for a, b, w in tour]
    _write_json(out_path, document)
    if plot_path:
        from .report import layout_figure

        layout_figure(graph, plot_path, tour=tour, counts=matrix)
    click.echo(f"stress {graph.final_stress:.4g} after {graph.iterations} iterations -> {out_path}")


@analyze.command("cluster")
@click.option("--protocol", "protocol_path", required=True, type=click.Path(exists=True))
@click.option("--k", "k", required=True, type=int)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--plot", "plot_path", type=click.Path(), default=None)
def cluster_cmd(protocol_path: str, k: int, seed: int, out_path: str, plot_path) -> None:
    """k-means state clustering and the clustered transition matrix."""
    protocols = read_protocols(protocol_path)
    clustering = cluster_states(protocols, k, seed)
    matrix = clustered_matrix(protocols, clustering)
    document = {"clustering": clustering.to_document(), "matrix": matrix.to_document()}
    _write_json(out_path, document)
    if plot_path:
        from .report import matrix_heatmap

        matrix_heatmap(matrix, plot_path, title=f"{k}-means clustered transitions")
    click.echo(f"{k} clusters, {matrix.total} transitions -> {out_path}")


@analyze.command("rules")
@click.option("--protocol", "protocol_path", required=True, type=click.Path(exists=True))
@click.option("--column", default="action", show_default=True)
@click.option("--buckets", type=int, default=2, show_default=True)
@click.option("--strategy", type=click.Choice(["equal_width", "equal_frequency"]),
              default="equal_width", show_default=True)
@click.option("--interval", nargs=2, type=int, default=None,
              help="Episode interval [lo hi]; defaults to all episodes.")
@click.option("--max-conditions", type=int, default=3, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--plot", "plot_path", type=click.Path(), default=None)
def rules_cmd(protocol_path, column, buckets, strategy, interval, max_conditions, out_path, plot_path):
    """Induce a surrogate rule set from concatenated evaluations."""
    protocols = read_protocols(protocol_path)
    if interval is None:
        interval = (0, max(p.episode_index for p in protocols))
    table = concatenate_evaluations(protocols, tuple(interval))
    data = bucketize(table, column, buckets, strategy, interval=tuple(interval))
    ruleset = induce_rules(data, max_conditions=max_conditions)
    stats = coverage_stats(ruleset, data)
    document = ruleset.to_document()
    document["coverage"] = stats.to_document()
    _write_json(out_path, document)
    if plot_path:
        from .report import rules_figure

        rules_figure(ruleset, plot_path)
    click.echo(ruleset.render())
    click.echo(f"-> {out_path}")


@main.command("serve")
@click.option("--db", "db_path", default=None, help="Database path (env AUTODO_DB_PATH).")
@click.option("--bind", default=None, help="host:port (env AUTODO_BIND_ADDR).")
def serve_cmd(db_path: str | None, bind: str | None) -> None:
    """Run the controller service with the shared in-process worker pool."""
    import uvicorn

    from .controller import ControllerService, SharedPoolLauncher, Store, create_app
    from .controller.launcher import CustomEndpointLauncher

    db = db_path or os.environ.get("AUTODO_DB_PATH", "autodo.db")
    address = bind or os.environ.get("AUTODO_BIND_ADDR", "127.0.0.1:8321")
    pool_size = int(os.environ.get("AUTODO_SHARED_POOL_SIZE", "2"))
    host, _, port = address.partition(":")

    tokens_env = os.environ.get("AUTODO_USER_TOKENS", "")
    principal_tokens = None
    if tokens_env:
        principal_tokens = {}
        for pair in tokens_env.split(","):
            principal, _, token = pair.strip().partition(":")
            if principal and token:
                principal_tokens[token] = principal

    service = ControllerService(
        store=Store(db), principal_tokens=principal_tokens, heartbeat_timeout=60.0
    )
    service.register_launcher("shared", SharedPoolLauncher(service, pool_size=pool_size))
    service.register_launcher("custom", CustomEndpointLauncher(f"http://{address}"))
    app = create_app(service)
    click.echo(f"controller on http://{address} (db {db}, pool {pool_size})")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8321), log_level="warning")


@main.command("worker")
@click.option("--job", "job_id", required=True)
@click.option("--token", required=True)
@click.option("--controller", "controller_url", required=True)
def worker_cmd(job_id: str, token: str, controller_url: str) -> None:
    """Execute one job against a running controller."""
    from .controller.worker import HttpControllerClient, run_worker

    client = HttpControllerClient(controller_url, job_id, token)
    run_worker(client)
    click.echo(f"job {job_id} finished")


if __name__ == "__main__":
    main()
