"""Matplotlib renderings of analytics artifacts, written to files.

Every function takes domain objects plus an output path; the CLI report
path wires these next to the delimited/JSON exports.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from ..analytics import GraphLayout, TransitionMatrix
from ..rules import RuleSet


def matrix_heatmap(matrix: TransitionMatrix, path: str | Path, title: str | None = None) -> None:
    n = len(matrix.labels)
    fig, ax = plt.subplots(figsize=(max(4.0, 0.5 * n + 2), max(3.5, 0.5 * n + 1.5)))
    image = ax.imshow(matrix.counts, cmap="Purples")
    ax.set_xticks(range(n), matrix.labels, rotation=45, ha="right", fontsize=8)
    ax.set_yticks(range(n), matrix.labels, fontsize=8)
    ax.set_xlabel("to")
    ax.set_ylabel("from")
    ax.set_title(title or f"{matrix.kind} transitions")
    if n <= 25:
        vmax = matrix.counts.max() if matrix.counts.size else 0
        for i in range(n):
            for j in range(n):
                count = int(matrix.counts[i, j])
                if count:
                    color = "white" if vmax and count > vmax / 2 else "black"
                    ax.text(j, i, str(count), ha="center", va="center", fontsize=7, color=color)
    fig.colorbar(image, ax=ax, shrink=0.8, label="count")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def layout_figure(
    graph: GraphLayout,
    path: str | Path,
    tour: list[tuple[str, str, float]] | None = None,
    counts: TransitionMatrix | None = None,
    title: str | None = None,
) -> None:
    """Node scatter plus optional count-weighted edges and the agent tour.

    Tour edge thickness grows with the normalized step index, so late
    transitions stand out. 3D layouts are drawn with a 3D projection.
    """
    three_d = graph.dims == 3
    fig = plt.figure(figsize=(7, 6))
    ax = fig.add_subplot(111, projection="3d" if three_d else None)

    def point(node: str):
        return graph.coords[node]

    if counts is not None:
        vmax = counts.counts.max() or 1
        for i, a in enumerate(counts.labels):
            for j, b in enumerate(counts.labels):
                c = int(counts.counts[i, j])
                if not c or a not in graph.coords or b not in graph.coords:
                    continue
                xs, ys, *zs = zip(point(a), point(b))
                width = 0.5 + 2.5 * c / vmax
                if three_d:
                    ax.plot(xs, ys, zs[0], color="tab:purple", alpha=0.35, linewidth=width)
                else:
                    ax.plot(xs, ys, color="tab:purple", alpha=0.35, linewidth=width)

    if tour:
        for a, b, weight in tour:
            xs, ys, *zs = zip(point(a), point(b))
            width = 0.5 + 3.5 * weight
            if three_d:
                ax.plot(xs, ys, zs[0], color="tab:blue", alpha=0.8, linewidth=width)
            else:
                ax.annotate(
                    "",
                    xy=(xs[1], ys[1]),
                    xytext=(xs[0], ys[0]),
                    arrowprops=dict(arrowstyle="->", color="tab:blue", lw=width, alpha=0.8),
                )

    nodes = list(graph.coords)
    coords = np.array([graph.coords[n] for n in nodes])
    if three_d:
        ax.scatter(coords[:, 0], coords[:, 1], coords[:, 2], s=120, color="white",
                   edgecolors="black", zorder=3)
        for n, (x, y, z) in zip(nodes, coords):
            ax.text(x, y, z, n, fontsize=8, ha="center", va="center", zorder=4)
    else:
        ax.scatter(coords[:, 0], coords[:, 1], s=300, color="white", edgecolors="black", zorder=3)
        for n, (x, y) in zip(nodes, coords):
            ax.text(x, y, n, fontsize=8, ha="center", va="center", zorder=4)
        ax.set_aspect("equal", adjustable="datalim")
    ax.set_title(title or f"transition graph (stress {graph.final_stress:.3g})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def rules_figure(ruleset: RuleSet, path: str | Path, title: str | None = None) -> None:
    """Coverage bars for each rule next to a slice-and-dice coverage treemap."""
    fig, (bars, tree) = plt.subplots(1, 2, figsize=(11, 4 + 0.3 * len(ruleset.rules)))

    names = [
        f"R{i + 1}: {rule.label}" for i, rule in enumerate(ruleset.rules)
    ] + [f"default: {ruleset.default_label}"]
    weights = list(ruleset.treemap_weights)
    precision = [
        (rule.correct_count / rule.coverage_count if rule.coverage_count else 0.0)
        for rule in ruleset.rules
    ] + [None]
    positions = range(len(names))
    bars.barh(positions, weights, color="tab:purple", alpha=0.8)
    bars.set_yticks(positions, names, fontsize=8)
    bars.invert_yaxis()
    bars.set_xlabel("coverage fraction")
    for y, (w, p) in enumerate(zip(weights, precision)):
        label = f"{w * 100:.0f}%" + (f" / prec {p * 100:.0f}%" if p is not None else "")
        bars.text(w + 0.01, y, label, va="center", fontsize=7)
    bars.set_xlim(0, 1.15)
    bars.set_title("per-rule coverage")

    _treemap(tree, weights, names)
    tree.set_title("global coverage treemap")
    fig.suptitle(title or "surrogate rule set")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _treemap(ax, weights: list[float], names: list[str]) -> None:
    """Slice-and-dice treemap: alternate cut orientation per rectangle."""
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_xticks([])
    ax.set_yticks([])
    x, y, w, h = 0.0, 0.0, 1.0, 1.0
    total = sum(weights) or 1.0
    cmap = plt.get_cmap("Purples")
    for index, (weight, name) in enumerate(zip(weights, names)):
        frac = weight / total
        remaining = sum(weights[index:]) / total or 1.0
        share = frac / remaining
        if w >= h:
            rect_w, rect_h = w * share, h
            rect = (x, y, rect_w, rect_h)
            x += rect_w
            w -= rect_w
        else:
            rect_w, rect_h = w, h * share
            rect = (x, y, rect_w, rect_h)
            y += rect_h
            h -= rect_h
        ax.add_patch(
            plt.Rectangle(
                rect[:2], rect[2], rect[3],
                facecolor=cmap(0.3 + 0.6 * (index / max(1, len(weights) - 1))),
                edgecolor="white",
            )
        )
        if rect[2] > 0.04 and rect[3] > 0.04:
            ax.text(
                rect[0] + rect[2] / 2,
                rect[1] + rect[3] / 2,
                f"{name}\n{weight * 100:.0f}%",
                ha="center",
                va="center",
                fontsize=7,
            )


def reward_curves(series: dict[str, list[float]], path: str | Path, title: str | None = None) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    for cid, values in series.items():
        ax.plot(range(len(values)), values, label=cid, linewidth=1.2)
    ax.set_xlabel("training episode")
    ax.set_ylabel("episode reward")
    ax.set_title(title or "training reward")
    if len(series) <= 12:
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def leaderboard(candidates: list[dict], path: str | Path, title: str | None = None) -> None:
    """Bar chart of rank scores for the scored candidates."""
    scored = [c for c in candidates if c.get("rank_score") is not None]
    names = [f"{c['candidate_id']} ({c['agent']})" for c in scored]
    values = [c["rank_score"] for c in scored]
    fig, ax = plt.subplots(figsize=(7, 0.4 * len(scored) + 2))
    positions = range(len(scored))
    ax.barh(positions, values, color="tab:purple", alpha=0.85)
    ax.set_yticks(positions, names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("mean evaluation episode reward")
    ax.set_title(title or "candidate leaderboard")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
