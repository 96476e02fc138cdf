"""Tabular agents: training and greedy evaluation.

Online kinds (q_learning, sarsa, dyna_q, random_policy) interact with a gym
through the interpreter; fitted_q learns offline from a tuple dataset. All
agents share one Q-table representation: a dict from discretized state key
to a per-action value list. Ties always break to the lowest action index.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..gymspec import DivisionByZero, GymSpec, Simulator
from .config import AgentKind
from .dataset import TupleDataset
from .discretize import StateDiscretizer
from .protocol import EvaluationProtocol, Labeler, from_rows, state_key


class IncompatibleDataSource(Exception):
    """Online agents need a GymSpec; offline agents need a TupleDataset."""


def argmax_lowest(values: list[float]) -> int:
    best = 0
    for i in range(1, len(values)):
        if values[i] > values[best]:
            best = i
    return best


@dataclass
class TrainedAgent:
    kind: AgentKind
    hyperparams: dict[str, float | int]
    q: dict[tuple, list[float]]
    n_actions: int
    train_steps: int
    discretizer: StateDiscretizer | None = None  # None for offline agents

    def key_for(self, vector: tuple[float, ...]) -> tuple:
        if self.discretizer is not None:
            return self.discretizer.key(vector)
        return state_key(vector)

    def greedy_action(self, vector: tuple[float, ...]) -> int:
        values = self.q.get(self.key_for(vector))
        if values is None:
            return 0
        return argmax_lowest(values)


@dataclass
class TrainResult:
    agent: TrainedAgent
    series: list[float] = field(default_factory=list)
    # per-episode training rewards (online) or fitted-iteration losses (offline)
    protocols: list[EvaluationProtocol] = field(default_factory=list)
    # online training episodes recorded as protocols (exploration included)


def train(
    source: GymSpec | TupleDataset,
    kind: AgentKind,
    hyperparams: dict[str, float | int],
    episodes: int,
    seed: int,
    state_bins: int = 10,
) -> TrainResult:
    """Train one agent; deterministic under seed.

    For offline kinds ``episodes`` is ignored: the iteration count is the
    agent's ``iterations`` hyperparameter and the series holds per-iteration
    sup-norm losses.
    """
    if kind.offline:
        if not isinstance(source, TupleDataset):
            raise IncompatibleDataSource(f"{kind.value} trains from a TupleDataset")
        return _train_fitted_q(source, hyperparams)
    if not isinstance(source, GymSpec):
        raise IncompatibleDataSource(f"{kind.value} trains on a GymSpec")
    return _train_online(source, kind, hyperparams, episodes, seed, state_bins)


def _train_online(
    spec: GymSpec,
    kind: AgentKind,
    hyperparams: dict[str, float | int],
    episodes: int,
    seed: int,
    state_bins: int,
) -> TrainResult:
    sim = Simulator(spec)
    disc = StateDiscretizer(spec, bins=state_bins)
    n_actions = sim.n_actions
    rng = random.Random(seed)
    columns = tuple(v.name for v in spec.state_vars)

    gamma = float(hyperparams.get("gamma", 0.95))
    alpha = float(hyperparams.get("alpha", 0.1))
    epsilon = float(hyperparams.get("epsilon", 0.1))
    planning_steps = int(hyperparams.get("planning_steps", 0))

    q: dict[tuple, list[float]] = {}
    model: dict[tuple[tuple, int], tuple[float, tuple, bool]] = {}
    observed: list[tuple[tuple, int]] = []

    def row(key: tuple) -> list[float]:
        if key not in q:
            q[key] = [0.0] * n_actions
        return q[key]

    def pick(key: tuple) -> int:
        if kind is AgentKind.RANDOM_POLICY or rng.random() < epsilon:
            return rng.randrange(n_actions)
        return argmax_lowest(row(key))

    labeler = Labeler()
    series: list[float] = []
    protocols: list[EvaluationProtocol] = []
    train_steps = 0

    for episode in range(episodes):
        state = sim.reset()
        key = disc.key(state.vector(spec))
        total = 0.0
        rows: list[tuple[int, str, tuple[float, ...], float]] = []
        action = pick(key)  # sarsa selects up front
        while not state.done:
            if kind is not AgentKind.SARSA:
                action = pick(key)
            pre_vector = state.vector(spec)
            next_state, reward, _ = sim.step(state, action)
            train_steps += 1
            total += reward
            rows.append((state.step, sim.labels[action], pre_vector, total))
            next_key = disc.key(next_state.vector(spec))
            terminal = sim.terminated(next_state)
            future = 0.0 if terminal else max(row(next_key))

            if kind is AgentKind.Q_LEARNING or kind is AgentKind.DYNA_Q:
                values = row(key)
                values[action] += alpha * (reward + gamma * future - values[action])
            elif kind is AgentKind.SARSA:
                next_action = pick(next_key)
                target = 0.0 if terminal else row(next_key)[next_action]
                values = row(key)
                values[action] += alpha * (reward + gamma * target - values[action])
                action = next_action

            if kind is AgentKind.DYNA_Q:
                pair = (key, action)
                if pair not in model:
                    observed.append(pair)
                model[pair] = (reward, next_key, terminal)
                for _ in range(planning_steps):
                    s_key, s_action = observed[rng.randrange(len(observed))]
                    m_reward, m_next, m_terminal = model[(s_key, s_action)]
                    m_future = 0.0 if m_terminal else max(row(m_next))
                    values = row(s_key)
                    values[s_action] += alpha * (m_reward + gamma * m_future - values[s_action])

            state, key = next_state, next_key
        series.append(total)
        protocols.append(from_rows(episode, rows, labeler=labeler, columns=columns))

    table = {} if kind is AgentKind.RANDOM_POLICY else q
    agent = TrainedAgent(kind, dict(hyperparams), table, n_actions, train_steps, disc)
    return TrainResult(agent=agent, series=series, protocols=protocols)


def _train_fitted_q(dataset: TupleDataset, hyperparams: dict[str, float | int]) -> TrainResult:
    gamma = float(hyperparams.get("gamma", 0.95))
    iterations = int(hyperparams.get("iterations", 500))
    n_actions = dataset.n_actions

    grouped: dict[tuple, dict[int, list[tuple[float, tuple]]]] = {}
    for tuple_row in dataset.rows:
        s = state_key(tuple_row.s)
        sp = state_key(tuple_row.sp)
        grouped.setdefault(s, {}).setdefault(tuple_row.a, []).append((tuple_row.r, sp))

    q: dict[tuple, list[float]] = {s: [0.0] * n_actions for s in grouped}
    series: list[float] = []
    for _ in range(iterations):
        updated: dict[tuple, list[float]] = {}
        loss = 0.0
        for s, by_action in grouped.items():
            values = list(q[s])
            for a, samples in by_action.items():
                total = 0.0
                for r, sp in samples:
                    future = max(q[sp]) if sp in q else 0.0
                    total += r + gamma * future
                values[a] = total / len(samples)
            updated[s] = values
            loss = max(loss, max(abs(x - y) for x, y in zip(values, q[s])))
        q = updated
        series.append(loss)

    agent = TrainedAgent(
        AgentKind.FITTED_Q, dict(hyperparams), q, n_actions, train_steps=iterations
    )
    return TrainResult(agent=agent, series=series)


def evaluate(
    spec: GymSpec, agent: TrainedAgent, episodes: int, seed: int = 0
) -> list[EvaluationProtocol]:
    """Greedy evaluation episodes; failed episodes are flagged, not raised."""
    sim = Simulator(spec)
    labeler = Labeler()
    columns = tuple(v.name for v in spec.state_vars)
    protocols: list[EvaluationProtocol] = []
    for episode in range(episodes):
        state = sim.reset()
        total = 0.0
        rows: list[tuple[int, str, tuple[float, ...], float]] = []
        failed = False
        while not state.done:
            vector = state.vector(spec)
            action = agent.greedy_action(vector)
            try:
                next_state, reward, _ = sim.step(state, action)
            except DivisionByZero:
                failed = True
                break
            total += reward
            rows.append((state.step, sim.labels[action], vector, total))
            state = next_state
        protocols.append(from_rows(episode, rows, labeler=labeler, columns=columns, failed=failed))
    return protocols
