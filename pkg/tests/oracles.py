"""Independent oracles for engine tests.

Value iteration, policy evaluation, and BFS are computed directly from the
interpreter's dynamics, with no dependency on the agents under test.
"""

from __future__ import annotations

from collections import deque

from autodo.gymspec import EnvState, GymSpec, Simulator


def enumerate_mdp(spec: GymSpec):
    """BFS the reachable state space; returns (states, transitions, terminals).

    transitions[vector][action_index] = (next_vector, reward)
    Dynamics must not depend on the step counter.
    """
    sim = Simulator(spec)
    start = sim.reset()
    start_vec = start.vector(spec)
    names = [v.name for v in spec.state_vars]

    transitions: dict[tuple, dict[int, tuple[tuple, float]]] = {}
    terminals: set[tuple] = set()
    queue = deque([start_vec])
    seen = {start_vec}
    while queue:
        vector = queue.popleft()
        state = EnvState(values=tuple(zip(names, vector)), step=0, done=False)
        if sim.terminated(state):
            terminals.add(vector)
            continue
        transitions[vector] = {}
        for action in range(sim.n_actions):
            nxt, reward, _ = sim.step(state, action)
            nxt_vec = nxt.vector(spec)
            transitions[vector][action] = (nxt_vec, reward)
            if nxt_vec not in seen:
                seen.add(nxt_vec)
                queue.append(nxt_vec)
    return sorted(seen), transitions, terminals


def value_iteration(spec: GymSpec, gamma: float, tol: float = 1e-14, max_iter: int = 100_000):
    """Optimal state values and greedy policy (ties to the lowest index)."""
    states, transitions, terminals = enumerate_mdp(spec)
    values = {s: 0.0 for s in states}
    for _ in range(max_iter):
        delta = 0.0
        updated = {}
        for s in states:
            if s in terminals:
                updated[s] = 0.0
                continue
            best = max(
                reward + gamma * (0.0 if nxt in terminals else values[nxt])
                for nxt, reward in transitions[s].values()
            )
            updated[s] = best
            delta = max(delta, abs(best - values[s]))
        values = updated
        if delta < tol:
            break
    policy = {}
    for s in states:
        if s in terminals:
            continue
        best_action, best_value = None, None
        for action in sorted(transitions[s]):
            nxt, reward = transitions[s][action]
            q = reward + gamma * (0.0 if nxt in terminals else values[nxt])
            if best_value is None or q > best_value + 1e-12:
                best_action, best_value = action, q
        policy[s] = best_action
    return values, policy


def optimal_q(spec: GymSpec, gamma: float, tol: float = 1e-14, max_iter: int = 100_000):
    """Q-value fixed point of the Bellman optimality equations."""
    values, _ = value_iteration(spec, gamma, tol, max_iter)
    _, transitions, terminals = enumerate_mdp(spec)
    q = {}
    for s, by_action in transitions.items():
        q[s] = {}
        for action, (nxt, reward) in by_action.items():
            q[s][action] = reward + gamma * (0.0 if nxt in terminals else values[nxt])
    return q


def policy_values(spec: GymSpec, policy, gamma: float, tol: float = 1e-14, max_iter: int = 100_000):
    """Iterative policy evaluation on the same absorbing-terminal model."""
    states, transitions, terminals = enumerate_mdp(spec)
    values = {s: 0.0 for s in states}
    for _ in range(max_iter):
        delta = 0.0
        updated = {}
        for s in states:
            if s in terminals or s not in policy:
                updated[s] = 0.0
                continue
            nxt, reward = transitions[s][policy[s]]
            v = reward + gamma * (0.0 if nxt in terminals else values[nxt])
            updated[s] = v
            delta = max(delta, abs(v - values[s]))
        values = updated
        if delta < tol:
            break
    return values


def bfs_shortest_episode(spec: GymSpec) -> int:
    """Fewest steps from the initial state to a terminating state."""
    sim = Simulator(spec)
    start = sim.reset().vector(spec)
    names = [v.name for v in spec.state_vars]
    queue = deque([(start, 0)])
    seen = {start}
    while queue:
        vector, depth = queue.popleft()
        state = EnvState(values=tuple(zip(names, vector)), step=0, done=False)
        if sim.terminated(state):
            return depth
        for action in range(sim.n_actions):
            nxt, _, _ = sim.step(state, action)
            nxt_vec = nxt.vector(spec)
            if nxt_vec not in seen:
                seen.add(nxt_vec)
                queue.append((nxt_vec, depth + 1))
    raise AssertionError("no terminating state reachable")
