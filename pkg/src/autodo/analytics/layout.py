"""Stress-majorization layout (SMACOF) and the agent tour overlay.

Minimizes the weighted stress sum_{i<j} w_ij (||x_i - x_j|| - d_ij)^2 via
the Guttman transform, which is non-increasing in stress per iteration.
Default weights are w_ij = d_ij^-2; the default dissimilarity for transition
graphs is the symmetric shortest-path hop count, with unreachable pairs set
to max_hop + 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import shortest_path

from ..engine.protocol import EvaluationProtocol
from .matrices import TransitionMatrix


class DegenerateInput(Exception):
    pass


class MissingCoordinates(Exception):
    pass


@dataclass(frozen=True)
class GraphLayout:
    dims: int
    coords: dict[str, tuple[float, ...]]
    final_stress: float
    iterations: int
    stress_trace: tuple[float, ...]  # stress after init, then after each iteration

    def to_document(self) -> dict:
        nodes = []
        for node, point in self.coords.items():
            entry = {"id": node, "x": point[0], "y": point[1]}
            if self.dims == 3:
                entry["z"] = point[2]
            nodes.append(entry)
        return {"dims": self.dims, "nodes": nodes, "final_stress": self.final_stress}


def stress(positions: np.ndarray, dissimilarity: np.ndarray, weights: np.ndarray) -> float:
    diff = positions[:, None, :] - positions[None, :, :]
    distances = np.linalg.norm(diff, axis=2)
    upper = np.triu_indices(len(positions), k=1)
    gaps = distances[upper] - dissimilarity[upper]
    return float(np.sum(weights[upper] * gaps * gaps))


def layout(
    nodes: list[str],
    dissimilarity: np.ndarray,
    dims: int = 2,
    max_iter: int = 300,
    tol: float = 1e-12,
    seed: int = 0,
    weights: np.ndarray | None = None,
) -> GraphLayout:
    d = np.asarray(dissimilarity, dtype=float)
    n = len(nodes)
    if d.shape != (n, n):
        raise ValueError(f"dissimilarity must be {n}x{n}")
    if not np.allclose(d, d.T):
        raise ValueError("dissimilarity must be symmetric")
    if np.any(np.diag(d) != 0):
        raise ValueError("dissimilarity diagonal must be zero")
    if not np.all(np.isfinite(d)):
        raise ValueError("dissimilarity must be finite")
    if dims not in (2, 3):
        raise ValueError("dims must be 2 or 3")

    if n == 1:
        point = tuple(0.0 for _ in range(dims))
        return GraphLayout(dims, {nodes[0]: point}, 0.0, 0, (0.0,))

    off_diag = d[~np.eye(n, dtype=bool)]
    if np.all(off_diag == 0):
        raise DegenerateInput("all pairwise distances are zero")

    if weights is None:
        with np.errstate(divide="ignore"):
            weights = np.where(d > 0, 1.0 / np.square(d, where=d > 0), 0.0)
        np.fill_diagonal(weights, 0.0)

    rng = np.random.default_rng(seed)
    positions = rng.random((n, dims))

    # V depends only on the weights; its pseudo-inverse is reused each iteration
    v = -weights.copy()
    np.fill_diagonal(v, weights.sum(axis=1))
    v_pinv = np.linalg.pinv(v)

    trace = [stress(positions, d, weights)]
    iterations = 0
    for _ in range(max_iter):
        diff = positions[:, None, :] - positions[None, :, :]
        distances = np.linalg.norm(diff, axis=2)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(distances > 0, d / distances, 0.0)
        b = -weights * ratio
        np.fill_diagonal(b, 0.0)
        np.fill_diagonal(b, -b.sum(axis=1))
        positions = v_pinv @ (b @ positions)
        iterations += 1
        current = stress(positions, d, weights)
        trace.append(current)
        previous = trace[-2]
        if previous > 0 and (previous - current) / previous < tol:
            break

    coords = {node: tuple(float(x) for x in positions[i]) for i, node in enumerate(nodes)}
    return GraphLayout(dims, coords, trace[-1], iterations, tuple(trace))


def hop_distances(matrix: TransitionMatrix) -> np.ndarray:
    """Symmetric shortest-path hop counts on the aggregated transition graph.

    Unreachable pairs get max_hop + 1 so every dissimilarity stays finite.
    """
    adjacency = (matrix.counts > 0).astype(float)
    d = shortest_path(adjacency, directed=False, unweighted=True)
    finite = d[np.isfinite(d)]
    max_hop = finite.max() if len(finite) else 0.0
    d[~np.isfinite(d)] = max_hop + 1.0
    return d


def graph_layout(
    matrix: TransitionMatrix, dims: int = 2, max_iter: int = 300, tol: float = 1e-12, seed: int = 0
) -> GraphLayout:
    """Stress layout of a transition matrix using hop-count dissimilarities."""
    return layout(list(matrix.labels), hop_distances(matrix), dims, max_iter, tol, seed)


def agent_tour(
    protocol: EvaluationProtocol, graph: GraphLayout
) -> list[tuple[str, str, float]]:
    """Ordered tour edges with weight (i+1)/m encoding step recency."""
    if not protocol.rows:
        return []
    for row in protocol.rows:
        if row.state_label not in graph.coords:
            raise MissingCoordinates(f"no coordinates for state {row.state_label!r}")
    pairs = list(zip(protocol.rows, protocol.rows[1:]))
    m = len(pairs)
    return [
        (a.state_label, b.state_label, (i + 1) / m) for i, (a, b) in enumerate(pairs)
    ]
