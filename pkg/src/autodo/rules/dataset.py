"""Row tables and labeled datasets for surrogate rule induction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..engine.protocol import EvaluationProtocol

ACTION_COLUMN = "action"


class EmptyInterval(Exception):
    pass


class ConstantColumn(Exception):
    pass


@dataclass(frozen=True)
class RowTable:
    """Concatenated protocol rows: state vars + action + reward + delta_reward."""

    state_columns: tuple[str, ...]
    actions: tuple[str, ...]
    states: np.ndarray  # (n, arity)
    rewards: np.ndarray  # cumulative
    deltas: np.ndarray

    def __len__(self) -> int:
        return len(self.actions)

    @property
    def columns(self) -> tuple[str, ...]:
        return self.state_columns + (ACTION_COLUMN, "reward", "delta_reward")

    def numeric_column(self, name: str) -> np.ndarray:
        if name in self.state_columns:
            return self.states[:, self.state_columns.index(name)]
        if name == "reward":
            return self.rewards
        if name == "delta_reward":
            return self.deltas
        raise KeyError(f"no numeric column {name!r}")


def concatenate_evaluations(
    protocols: list[EvaluationProtocol], interval: tuple[int, int]
) -> RowTable:
    """Row-wise concatenation of the episodes inside [lo, hi], (episode, step) order."""
    lo, hi = interval
    if lo < 0 or lo > hi:
        raise EmptyInterval(f"invalid interval [{lo}, {hi}]")
    chosen = sorted(
        (p for p in protocols if lo <= p.episode_index <= hi), key=lambda p: p.episode_index
    )
    if not chosen:
        raise EmptyInterval(f"no episodes in [{lo}, {hi}]")

    arity = max((len(r.state) for p in chosen for r in p.rows if r.state), default=0)
    state_columns = None
    for p in chosen:
        if p.columns and len(p.columns) == arity:
            state_columns = p.columns
            break
    if state_columns is None:
        state_columns = tuple(f"s_{i}" for i in range(arity))

    actions, states, rewards, deltas = [], [], [], []
    for protocol in chosen:
        for row in sorted(protocol.rows, key=lambda r: r.step):
            actions.append(row.action)
            states.append(row.state if row.state else (0.0,) * arity)
            rewards.append(row.reward)
            deltas.append(row.delta_reward)
    return RowTable(
        state_columns=state_columns,
        actions=tuple(actions),
        states=np.asarray(states, dtype=float).reshape(len(actions), arity),
        rewards=np.asarray(rewards, dtype=float),
        deltas=np.asarray(deltas, dtype=float),
    )


@dataclass(frozen=True)
class LabeledDataset:
    """Numeric feature matrix plus a categorical label column.

    The bucketized (or categorical) source column is discarded from the
    features; bucket boundaries are kept for reporting.
    """

    features: tuple[str, ...]
    matrix: np.ndarray  # (n, len(features))
    labels: tuple[str, ...]
    label_column: str
    boundaries: tuple[float, ...] | None = None
    interval: tuple[int, int] | None = None

    def __len__(self) -> int:
        return len(self.labels)

    def column(self, name: str) -> np.ndarray:
        return self.matrix[:, self.features.index(name)]


def bucketize(
    table: RowTable,
    column: str,
    n_buckets: int = 2,
    strategy: str = "equal_width",
    interval: tuple[int, int] | None = None,
) -> LabeledDataset:
    """Turn one column into the categorical prediction label.

    The action column passes through unchanged; numeric columns are batched
    into ``n_buckets`` labels B0..B{n-1} by equal width or equal frequency.
    """
    if column == ACTION_COLUMN:
        labels = table.actions
        boundaries = None
    else:
        values = table.numeric_column(column)
        if n_buckets < 2:
            raise ValueError("n_buckets must be at least 2")
        if strategy == "equal_width":
            lo, hi = float(values.min()), float(values.max())
            if hi == lo:
                raise ConstantColumn(f"column {column!r} is constant; cannot form 2 buckets")
            width = (hi - lo) / n_buckets
            index = np.minimum(((values - lo) / width).astype(int), n_buckets - 1)
        elif strategy == "equal_frequency":
            quantiles = [i / n_buckets for i in range(1, n_buckets)]
            boundaries_arr = np.quantile(values, quantiles)
            index = np.searchsorted(boundaries_arr, values, side="right")
        else:
            raise ValueError(f"unknown bucketing strategy {strategy!r}")
        if len(np.unique(index)) < 2:
            raise ConstantColumn(f"column {column!r} yields fewer than 2 nonempty buckets")
        labels = tuple(f"B{i}" for i in index)
        if strategy == "equal_width":
            boundaries = tuple(lo + width * i for i in range(1, n_buckets))
        else:
            boundaries = tuple(float(b) for b in boundaries_arr)

    feature_names = [c for c in table.columns if c not in (column, ACTION_COLUMN)]
    columns = [table.numeric_column(name) for name in feature_names]
    matrix = (
        np.column_stack(columns) if columns else np.zeros((len(table), 0), dtype=float)
    )
    return LabeledDataset(
        features=tuple(feature_names),
        matrix=matrix,
        labels=tuple(labels),
        label_column=column,
        boundaries=boundaries,
        interval=interval,
    )
