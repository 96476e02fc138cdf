from __future__ import annotations

import pytest

from autodo.engine import (
    AgentKind,
    IncompatibleDataSource,
    NonDiscretizableState,
    StateDiscretizer,
    TupleDataset,
    TupleRow,
    default_schemas,
    evaluate,
    train,
)
from autodo.engine.protocol import read_csv, write_csv
from autodo.gymspec import Simulator

from oracles import (
    bfs_shortest_episode,
    enumerate_mdp,
    optimal_q,
    policy_values,
    value_iteration,
)


def exhaustive_dataset(spec) -> TupleDataset:
    """Every (state, action) pair of the reachable MDP, once."""
    _, transitions, _ = enumerate_mdp(spec)
    rows = []
    for s, by_action in transitions.items():
        for action, (sp, reward) in by_action.items():
            rows.append(TupleRow(s=s, a=action, r=reward, sp=sp))
    return TupleDataset(tuple(rows))


class TestDiscretizer:
    def test_integer_identity(self, gridworld):
        disc = StateDiscretizer(gridworld)
        assert disc.key((3.0, 1.0)) == (3, 1)

    def test_real_binning(self):
        import json

        from autodo.gymspec import parse_spec

        doc = {
            "name": "t", "description": "",
            "state_vars": [{"name": "v", "kind": "real", "lower": 0.0, "upper": 1.0}],
            "actions": [{"name": "a", "params": []}],
            "transition": [],
            "reward_metrics": [{"name": "m", "weight": 1.0, "expression": "v"}],
            "termination": "false", "max_steps": 5,
            "initial_state": {"v": 0.5},
        }
        spec = parse_spec(json.dumps(doc))
        disc = StateDiscretizer(spec, bins=10)
        assert disc.key((0.0,)) == (0,)
        assert disc.key((0.95,)) == (9,)
        assert disc.key((1.0,)) == (9,)  # top edge folds into last bin
        with pytest.raises(NonDiscretizableState):
            StateDiscretizer(spec, bins=0)


class TestTrain:
    def test_random_policy_learns_nothing(self, gridworld):
        result = train(gridworld, AgentKind.RANDOM_POLICY, {}, episodes=5, seed=7)
        assert len(result.series) == 5
        assert result.agent.q == {}
        assert result.agent.train_steps > 0

    def test_deterministic_under_seed(self, gridworld):
        a = train(gridworld, AgentKind.Q_LEARNING, {"gamma": 0.95}, episodes=30, seed=11)
        b = train(gridworld, AgentKind.Q_LEARNING, {"gamma": 0.95}, episodes=30, seed=11)
        assert a.series == b.series
        assert a.agent.q == b.agent.q

    def test_incompatible_sources(self, gridworld):
        with pytest.raises(IncompatibleDataSource):
            train(gridworld, AgentKind.FITTED_Q, {}, episodes=5, seed=0)
        dataset = TupleDataset((TupleRow((0.0,), 0, 1.0, (1.0,)),))
        with pytest.raises(IncompatibleDataSource):
            train(dataset, AgentKind.Q_LEARNING, {}, episodes=5, seed=0)

    def test_q_learning_matches_value_iteration(self, gridworld):
        gamma = 0.95
        result = train(
            gridworld,
            AgentKind.Q_LEARNING,
            {"gamma": gamma, "alpha": 0.1, "epsilon": 0.5},
            episodes=500,
            seed=3,
        )
        _, vi_policy = value_iteration(gridworld, gamma)
        vi_values, _ = value_iteration(gridworld, gamma)
        learned_policy = {
            s: result.agent.greedy_action(s) for s in vi_policy
        }
        learned_values = policy_values(gridworld, learned_policy, gamma)
        for s, v_star in vi_values.items():
            assert learned_values[s] == pytest.approx(v_star, abs=1e-9)

    def test_sarsa_reaches_goal(self, gridworld):
        result = train(
            gridworld,
            AgentKind.SARSA,
            {"gamma": 0.95, "alpha": 0.1, "epsilon": 0.5},
            episodes=600,
            seed=5,
        )
        protocols = evaluate(gridworld, result.agent, 1)
        assert protocols[0].rows[-1].reward > 0  # reached the bonus

    def test_dyna_q_converges_faster_per_episode(self, gridworld):
        gamma = 0.95
        result = train(
            gridworld,
            AgentKind.DYNA_Q,
            {"gamma": gamma, "alpha": 0.1, "epsilon": 0.3, "planning_steps": 10},
            episodes=200,
            seed=3,
        )
        vi_values, vi_policy = value_iteration(gridworld, gamma)
        learned_policy = {s: result.agent.greedy_action(s) for s in vi_policy}
        learned_values = policy_values(gridworld, learned_policy, gamma)
        for s, v_star in vi_values.items():
            assert learned_values[s] == pytest.approx(v_star, abs=1e-9)

    def test_fitted_q_two_state_analytic(self):
        # two states, one action each: s0 -(r=1)-> s1, s1 -(r=0)-> s1
        # Bellman: Q(s1) = 0 + g*Q(s1) = 0;  Q(s0) = 1 + g*Q(s1) = 1
        gamma = 0.9
        rows = (
            TupleRow((0.0,), 0, 1.0, (1.0,)),
            TupleRow((1.0,), 0, 0.0, (1.0,)),
        )
        result = train(
            TupleDataset(rows), AgentKind.FITTED_Q, {"gamma": gamma, "iterations": 200},
            episodes=0, seed=0,
        )
        assert result.agent.q[(0.0,)][0] == pytest.approx(1.0, abs=1e-6)
        assert result.agent.q[(1.0,)][0] == pytest.approx(0.0, abs=1e-6)

    def test_fitted_q_loop_analytic(self):
        # self-loop with reward 1: Q = 1/(1-g)
        gamma = 0.5
        rows = (TupleRow((0.0,), 0, 1.0, (0.0,)),)
        result = train(
            TupleDataset(rows), AgentKind.FITTED_Q, {"gamma": gamma, "iterations": 100},
            episodes=0, seed=0,
        )
        assert result.agent.q[(0.0,)][0] == pytest.approx(2.0, abs=1e-6)

    def test_fitted_q_gridworld_fixed_point(self, gridworld):
        gamma = 0.95
        dataset = exhaustive_dataset(gridworld)
        result = train(
            TupleDataset(dataset.rows),
            AgentKind.FITTED_Q,
            {"gamma": gamma, "iterations": 600},
            episodes=0,
            seed=0,
        )
        expected = optimal_q(gridworld, gamma)
        for s, by_action in expected.items():
            for action, q_star in by_action.items():
                assert result.agent.q[s][action] == pytest.approx(q_star, abs=1e-6)

    def test_offline_online_value_agreement(self, gridworld):
        gamma = 0.95
        online = train(
            gridworld, AgentKind.Q_LEARNING,
            {"gamma": gamma, "alpha": 0.1, "epsilon": 0.5}, episodes=500, seed=3,
        )
        offline = train(
            exhaustive_dataset(gridworld), AgentKind.FITTED_Q,
            {"gamma": gamma, "iterations": 600}, episodes=0, seed=0,
        )
        _, transitions, _ = enumerate_mdp(gridworld)
        online_policy = {s: online.agent.greedy_action(s) for s in transitions}
        offline_policy = {s: offline.agent.greedy_action(s) for s in transitions}
        v_online = policy_values(gridworld, online_policy, gamma)
        v_offline = policy_values(gridworld, offline_policy, gamma)
        for s in transitions:
            assert v_online[s] == pytest.approx(v_offline[s], abs=1e-9)


@pytest.fixture(scope="module")
def trained(gridworld):
    return train(
        gridworld, AgentKind.Q_LEARNING,
        {"gamma": 0.95, "alpha": 0.1, "epsilon": 0.5}, episodes=500, seed=3,
    ).agent


class TestEvaluate:

    def test_deterministic_protocols(self, gridworld, trained):
        protocols = evaluate(gridworld, trained, 2)
        assert len(protocols) == 2
        assert protocols[0].rows == protocols[1].rows

    def test_optimal_episode_length_is_shortest_path(self, gridworld, trained):
        protocols = evaluate(gridworld, trained, 1)
        assert len(protocols[0].rows) == bfs_shortest_episode(gridworld)

    def test_delta_rule(self, gridworld, trained):
        rows = evaluate(gridworld, trained, 1)[0].rows
        for i in range(1, len(rows)):
            assert rows[i].delta_reward == pytest.approx(rows[i].reward - rows[i - 1].reward)
        assert rows[0].delta_reward == rows[0].reward

    def test_steps_increase_by_one(self, gridworld, trained):
        rows = evaluate(gridworld, trained, 1)[0].rows
        assert [r.step for r in rows] == list(range(len(rows)))

    def test_labels_first_appearance(self, gridworld, trained):
        rows = evaluate(gridworld, trained, 1)[0].rows
        seen: list[str] = []
        for row in rows:
            if row.state_label not in seen:
                assert row.state_label == f"S{len(seen) + 1}"
                seen.append(row.state_label)


class TestProtocolCsv:
    def test_round_trip(self, gridworld, tmp_path):
        agent = train(gridworld, AgentKind.RANDOM_POLICY, {}, episodes=3, seed=1)
        protocols = evaluate(gridworld, agent.agent, 2)
        path = tmp_path / "protocol.csv"
        write_csv(protocols, path)
        loaded = read_csv(path)
        assert len(loaded) == len(protocols)
        for original, parsed in zip(protocols, loaded):
            assert parsed.episode_index == original.episode_index
            assert [r.step for r in parsed.rows] == [r.step for r in original.rows]
            assert [r.action for r in parsed.rows] == [r.action for r in original.rows]
            assert [r.state for r in parsed.rows] == [r.state for r in original.rows]
            assert [r.reward for r in parsed.rows] == [r.reward for r in original.rows]
            assert [r.state_label for r in parsed.rows] == [
                r.state_label for r in original.rows
            ]

    def test_header_shape(self, gridworld, tmp_path):
        agent = train(gridworld, AgentKind.RANDOM_POLICY, {}, episodes=1, seed=1)
        protocols = evaluate(gridworld, agent.agent, 1)
        path = tmp_path / "protocol.csv"
        write_csv(protocols, path)
        header = path.read_text().splitlines()[0]
        assert header == "episode,step,action,reward,delta_reward,s_0,s_1"


class TestSchemas:
    def test_defaults_documented(self):
        schemas = default_schemas()
        online = schemas[AgentKind.Q_LEARNING]
        assert online.get("gamma").default == 0.95
        assert online.get("alpha").default == 0.1
        assert online.get("epsilon").default == 0.1

    def test_every_kind_has_schema(self):
        schemas = default_schemas()
        assert set(schemas) == set(AgentKind)
