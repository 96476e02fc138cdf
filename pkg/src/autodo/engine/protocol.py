"""Evaluation protocols: the per-step record of an agent acting in a gym.

Each row holds the step index, the action taken, the state the agent acted
from, the cumulative reward after the action, and the reward delta. State
and action labels (S1, S2, ... / A1, A2, ...) are assigned in order of
first appearance.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from pathlib import Path

STATE_DECIMALS = 9  # canonical rounding for state identity


def state_key(vector: tuple[float, ...]) -> tuple[float, ...]:
    return tuple(round(float(v), STATE_DECIMALS) for v in vector)


@dataclass(frozen=True)
class ProtocolStep:
    step: int
    action: str
    state_label: str
    state: tuple[float, ...] | None
    reward: float  # cumulative
    delta_reward: float


@dataclass(frozen=True)
class EvaluationProtocol:
    episode_index: int
    rows: tuple[ProtocolStep, ...]
    columns: tuple[str, ...] | None = None  # state var names, when known
    failed: bool = False

    @property
    def total_reward(self) -> float:
        return self.rows[-1].reward if self.rows else 0.0

    def state_sequence(self) -> list[str]:
        return [row.state_label for row in self.rows]

    def action_sequence(self) -> list[str]:
        return [row.action for row in self.rows]

    def to_document(self) -> dict:
        return {
            "episode_index": self.episode_index,
            "failed": self.failed,
            "columns": list(self.columns) if self.columns else None,
            "rows": [
                {
                    "step": r.step,
                    "action": r.action,
                    "state_label": r.state_label,
                    "state": list(r.state) if r.state is not None else None,
                    "reward": r.reward,
                    "delta_reward": r.delta_reward,
                }
                for r in self.rows
            ],
        }


class Labeler:
    """Assigns S1, S2, ... (or any prefix) in order of first appearance."""

    def __init__(self, prefix: str = "S"):
        self.prefix = prefix
        self._by_key: dict = {}

    def label(self, key) -> str:
        if key not in self._by_key:
            self._by_key[key] = f"{self.prefix}{len(self._by_key) + 1}"
        return self._by_key[key]

    def __len__(self) -> int:
        return len(self._by_key)


def from_rows(
    episode_index: int,
    rows: list[tuple[int, str, tuple[float, ...], float]],
    labeler: Labeler | None = None,
    columns: tuple[str, ...] | None = None,
    failed: bool = False,
) -> EvaluationProtocol:
    """Build a protocol from (step, action, state vector, cumulative reward) rows."""
    labeler = labeler or Labeler()
    steps: list[ProtocolStep] = []
    previous = 0.0
    for i, (step, action, vector, reward) in enumerate(rows):
        delta = reward - previous if i > 0 else reward
        previous = reward
        steps.append(
            ProtocolStep(
                step=step,
                action=action,
                state_label=labeler.label(state_key(vector)),
                state=tuple(float(v) for v in vector),
                reward=float(reward),
                delta_reward=float(delta),
            )
        )
    return EvaluationProtocol(episode_index, tuple(steps), columns=columns, failed=failed)


def labeled_protocol(
    episode_index: int,
    actions: list[str],
    states: list[str],
    rewards: list[float],
) -> EvaluationProtocol:
    """Build a protocol directly from display labels (no state vectors)."""
    rows = []
    previous = 0.0
    for i, (action, state, reward) in enumerate(zip(actions, states, rewards)):
        delta = reward - previous if i > 0 else reward
        previous = reward
        rows.append(ProtocolStep(i, action, state, None, float(reward), float(delta)))
    return EvaluationProtocol(episode_index, tuple(rows))


# --- CSV format: episode, step, action, reward, delta_reward, s_0..s_{n-1} ---


def write_csv(protocols: list[EvaluationProtocol], target: str | Path | io.TextIOBase) -> None:
    arity = 0
    for protocol in protocols:
        for row in protocol.rows:
            if row.state is not None:
                arity = max(arity, len(row.state))
    header = ["episode", "step", "action", "reward", "delta_reward"] + [
        f"s_{i}" for i in range(arity)
    ]

    def emit(handle) -> None:
        writer = csv.writer(handle)
        writer.writerow(header)
        for protocol in protocols:
            for row in protocol.rows:
                state = list(row.state) if row.state is not None else [""] * arity
                writer.writerow(
                    [protocol.episode_index, row.step, row.action, row.reward, row.delta_reward]
                    + [_fmt(v) for v in state]
                )

    if isinstance(target, (str, Path)):
        with open(target, "w", newline="", encoding="utf-8") as handle:
            emit(handle)
    else:
        emit(target)


def read_csv(source: str | Path | io.TextIOBase) -> list[EvaluationProtocol]:
    if isinstance(source, (str, Path)):
        with open(source, newline="", encoding="utf-8") as handle:
            return _parse(handle)
    return _parse(source)


def _parse(handle) -> list[EvaluationProtocol]:
    reader = csv.reader(handle)
    header = next(reader, None)
    if header is None:
        return []
    expected = ["episode", "step", "action", "reward", "delta_reward"]
    if [h.strip() for h in header[:5]] != expected:
        raise ValueError(f"protocol CSV must start with columns {expected}, found {header[:5]}")
    arity = len(header) - 5
    labeler = Labeler()
    grouped: dict[int, list[tuple[int, str, tuple[float, ...], float]]] = {}
    for record in reader:
        if not record:
            continue
        episode = int(record[0])
        state = tuple(float(v) for v in record[5 : 5 + arity] if v != "")
        grouped.setdefault(episode, []).append(
            (int(record[1]), record[2], state, float(record[3]))
        )
    columns = tuple(header[5:]) if arity else None
    protocols = []
    for episode in sorted(grouped):
        rows = sorted(grouped[episode], key=lambda r: r[0])
        protocols.append(from_rows(episode, rows, labeler=labeler, columns=columns))
    return protocols


def _fmt(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)
