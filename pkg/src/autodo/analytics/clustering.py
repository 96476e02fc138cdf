"""k-means over protocol state vectors (k-means++ init, Lloyd iterations).

Deterministic under seed; empty clusters are repaired by splitting the
largest cluster at its farthest member.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..engine.protocol import EvaluationProtocol
from .matrices import _label_states, row_state_id

MAX_ITER = 300
TOL = 1e-6


class TooFewStates(Exception):
    pass


@dataclass(frozen=True)
class StateClustering:
    k: int
    assignment: dict[str, int]  # state label -> cluster id in [0, k)
    centroids: np.ndarray  # (k, arity)
    seed: int

    def to_document(self) -> dict:
        return {
            "k": self.k,
            "seed": self.seed,
            "assignment": dict(self.assignment),
            "centroids": self.centroids.tolist(),
        }


def distinct_states(protocols: list[EvaluationProtocol]):
    """(labels, vectors) for the distinct states, in first-appearance order."""
    label_of = _label_states(protocols)
    labels: list[str] = []
    vectors: list[tuple[float, ...]] = []
    seen = set()
    for protocol in protocols:
        for row in protocol.rows:
            key = row_state_id(row)
            if key in seen:
                continue
            seen.add(key)
            if row.state is None or len(row.state) == 0:
                raise TooFewStates("clustering requires state vectors on every row")
            labels.append(label_of[key])
            vectors.append(row.state)
    return labels, np.asarray(vectors, dtype=float)


def cluster_states(protocols: list[EvaluationProtocol], k: int, seed: int = 0) -> StateClustering:
    labels, points = distinct_states(protocols)
    if k < 1 or len(labels) < k:
        raise TooFewStates(f"{len(labels)} distinct states < k={k}")
    centroids = _kmeans_pp_init(points, k, np.random.default_rng(seed))

    assignment = np.zeros(len(points), dtype=int)
    for _ in range(MAX_ITER):
        distances = np.linalg.norm(points[:, None, :] - centroids[None, :, :], axis=2)
        assignment = distances.argmin(axis=1)
        assignment = _repair_empty(points, centroids, assignment, k)
        updated = np.array(
            [points[assignment == j].mean(axis=0) for j in range(k)]
        )
        shift = float(np.linalg.norm(updated - centroids))
        centroids = updated
        if shift < TOL:
            break

    return StateClustering(
        k=k,
        assignment={label: int(c) for label, c in zip(labels, assignment)},
        centroids=centroids,
        seed=seed,
    )


def _kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(points)
    centroids = np.empty((k, points.shape[1]), dtype=float)
    centroids[0] = points[rng.integers(0, n)]
    for i in range(1, k):
        dist_sq = np.min(
            np.linalg.norm(points[:, None, :] - centroids[None, :i, :], axis=2) ** 2, axis=1
        )
        total = dist_sq.sum()
        if total == 0.0:
            centroids[i] = points[rng.integers(0, n)]
            continue
        centroids[i] = points[rng.choice(n, p=dist_sq / total)]
    return centroids


def _repair_empty(
    points: np.ndarray, centroids: np.ndarray, assignment: np.ndarray, k: int
) -> np.ndarray:
    assignment = assignment.copy()
    for j in range(k):
        if np.any(assignment == j):
            continue
        sizes = np.bincount(assignment, minlength=k)
        largest = int(sizes.argmax())
        members = np.flatnonzero(assignment == largest)
        off = np.linalg.norm(points[members] - centroids[largest], axis=1)
        farthest = members[int(off.argmax())]
        assignment[farthest] = j
        centroids[j] = points[farthest]
    return assignment
