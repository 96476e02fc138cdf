"""Transition matrices and temporal graphs derived from evaluation protocols.

State identity is the canonical 9-decimal rounding of the state vector when
vectors are present, falling back to the row's display label otherwise; the
emitted labels follow first appearance across all protocols. Transitions
never cross episode boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..engine.protocol import EvaluationProtocol, ProtocolStep, state_key


class EmptyProtocol(Exception):
    pass


class UnassignedState(Exception):
    pass


@dataclass(frozen=True)
class TransitionMatrix:
    labels: tuple[str, ...]
    counts: np.ndarray  # square, non-negative ints
    kind: str  # "state" | "action" | "clustered_state"

    def count(self, from_label: str, to_label: str) -> int:
        i = self.labels.index(from_label)
        j = self.labels.index(to_label)
        return int(self.counts[i, j])

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_document(self) -> dict:
        return {
            "kind": self.kind,
            "labels": list(self.labels),
            "counts": self.counts.astype(int).tolist(),
        }


@dataclass(frozen=True)
class TemporalTransitionGraph:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str, int], ...]  # (from, to, step of arrival)

    def to_document(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "edges": [{"from": a, "to": b, "step": t} for a, b, t in self.edges],
        }


def row_state_id(row: ProtocolStep):
    """Identity for matrix aggregation: rounded vector, else display label."""
    if row.state is not None and len(row.state) > 0:
        return state_key(row.state)
    return ("label", row.state_label)


def _label_states(protocols: list[EvaluationProtocol]) -> dict:
    """Identity -> display label, in first-appearance order across protocols."""
    labels: dict = {}
    for protocol in protocols:
        for row in protocol.rows:
            key = row_state_id(row)
            if key not in labels:
                labels[key] = row.state_label
    return labels


def state_transition_matrix(protocols: list[EvaluationProtocol]) -> TransitionMatrix:
    if not protocols:
        raise EmptyProtocol("no protocols given")
    labels = _label_states(protocols)
    index = {key: i for i, key in enumerate(labels)}
    n = len(index)
    counts = np.zeros((n, n), dtype=np.int64)
    for protocol in protocols:
        rows = protocol.rows
        for a, b in zip(rows, rows[1:]):
            counts[index[row_state_id(a)], index[row_state_id(b)]] += 1
    return TransitionMatrix(tuple(labels.values()), counts, "state")


def action_transition_matrix(protocols: list[EvaluationProtocol]) -> TransitionMatrix:
    if not protocols:
        raise EmptyProtocol("no protocols given")
    labels: dict[str, int] = {}
    for protocol in protocols:
        for row in protocol.rows:
            if row.action not in labels:
                labels[row.action] = len(labels)
    n = len(labels)
    counts = np.zeros((n, n), dtype=np.int64)
    for protocol in protocols:
        rows = protocol.rows
        for a, b in zip(rows, rows[1:]):
            counts[labels[a.action], labels[b.action]] += 1
    return TransitionMatrix(tuple(labels), counts, "action")


def temporal_graph(protocol: EvaluationProtocol) -> TemporalTransitionGraph:
    """One step-labeled edge per consecutive row pair of a single episode."""
    if protocol is None or not protocol.rows:
        raise EmptyProtocol("protocol has no rows")
    nodes: dict[str, None] = {}
    for row in protocol.rows:
        nodes.setdefault(row.state_label, None)
    edges = tuple(
        (a.state_label, b.state_label, b.step)
        for a, b in zip(protocol.rows, protocol.rows[1:])
    )
    return TemporalTransitionGraph(tuple(nodes), edges)


def clustered_matrix(protocols: list[EvaluationProtocol], clustering) -> TransitionMatrix:
    """Aggregate state transitions through a clustering assignment.

    Labels are C1..Ck; the total transition count is preserved.
    """
    if not protocols:
        raise EmptyProtocol("no protocols given")
    label_of = _label_states(protocols)
    k = clustering.k
    counts = np.zeros((k, k), dtype=np.int64)

    def cluster(row: ProtocolStep) -> int:
        label = label_of[row_state_id(row)]
        if label not in clustering.assignment:
            raise UnassignedState(f"state {label!r} missing from the clustering")
        return clustering.assignment[label]

    for protocol in protocols:
        rows = protocol.rows
        for a, b in zip(rows, rows[1:]):
            counts[cluster(a), cluster(b)] += 1
    labels = tuple(f"C{i + 1}" for i in range(k))
    return TransitionMatrix(labels, counts, "clustered_state")


def filter_states(
    protocols: list[EvaluationProtocol], predicate: Callable[[ProtocolStep], bool]
) -> list[EvaluationProtocol]:
    """Drop rows failing the predicate.

    Surviving rows are re-linked only when consecutive in the original
    episode, so each maximal run becomes its own protocol segment.
    """
    out: list[EvaluationProtocol] = []
    for protocol in protocols:
        segment: list[ProtocolStep] = []
        last_index = None
        for i, row in enumerate(protocol.rows):
            if not predicate(row):
                continue
            if last_index is not None and i != last_index + 1 and segment:
                out.append(
                    EvaluationProtocol(
                        protocol.episode_index, tuple(segment), protocol.columns, protocol.failed
                    )
                )
                segment = []
            segment.append(row)
            last_index = i
        if segment:
            out.append(
                EvaluationProtocol(
                    protocol.episode_index, tuple(segment), protocol.columns, protocol.failed
                )
            )
    return out
