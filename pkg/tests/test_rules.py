from __future__ import annotations

import numpy as np
import pytest

from autodo.engine import AgentKind, train
from autodo.engine.protocol import from_rows
from autodo.rules import (
    ConstantColumn,
    EmptyInterval,
    LabeledDataset,
    SchemaMismatch,
    accuracy,
    bucketize,
    concatenate_evaluations,
    coverage_stats,
    induce_rules,
)

from oracles import value_iteration


def protocol_of(episode, actions, states, rewards, columns=("x",)):
    rows = [
        (i, actions[i], tuple(float(v) for v in states[i]), float(rewards[i]))
        for i in range(len(actions))
    ]
    return from_rows(episode, rows, columns=columns)


def simple_dataset(xs, labels, feature="x"):
    return LabeledDataset(
        features=(feature,),
        matrix=np.asarray(xs, dtype=float).reshape(-1, 1),
        labels=tuple(labels),
        label_column="action",
    )


class TestConcatenate:
    @pytest.fixture
    def protocols(self):
        return [
            protocol_of(e, ["a", "b", "c"][: 3], [(e,), (e + 1,), (e + 2,)], [1, 2, 3])
            for e in range(3)
        ]

    def test_single_episode_interval(self, protocols):
        table = concatenate_evaluations(protocols, (2, 2))
        assert len(table) == 3
        assert all(v == pytest.approx(2 + i) for i, v in enumerate(table.states[:, 0]))

    def test_wide_interval_counts_rows(self, protocols):
        table = concatenate_evaluations(protocols, (0, 20))
        assert len(table) == 9

    def test_order_preserved(self, protocols):
        table = concatenate_evaluations(protocols, (0, 2))
        assert list(table.actions[:3]) == ["a", "b", "c"]
        assert table.states[0, 0] == 0.0 and table.states[3, 0] == 1.0

    def test_empty_interval(self, protocols):
        with pytest.raises(EmptyInterval):
            concatenate_evaluations(protocols, (5, 9))
        with pytest.raises(EmptyInterval):
            concatenate_evaluations(protocols, (3, 2))

    def test_columns_carried(self, protocols):
        table = concatenate_evaluations(protocols, (0, 1))
        assert table.state_columns == ("x",)
        assert table.columns == ("x", "action", "reward", "delta_reward")


class TestBucketize:
    def make_table(self, values):
        protocols = [
            protocol_of(0, ["go"] * len(values), [(v,) for v in values], values)
        ]
        return concatenate_evaluations(protocols, (0, 0))

    def test_action_passthrough(self):
        protocols = [protocol_of(0, ["up", "down", "up"], [(0,), (1,), (2,)], [1, 2, 3])]
        table = concatenate_evaluations(protocols, (0, 0))
        data = bucketize(table, "action")
        assert data.labels == ("up", "down", "up")
        assert "action" not in data.features

    def test_equal_width_boundary(self):
        table = self.make_table(list(range(1, 11)))
        data = bucketize(table, "reward", n_buckets=2, strategy="equal_width")
        # values < 5.5 in B0, the rest in B1
        assert data.labels[:5] == ("B0",) * 5
        assert data.labels[5:] == ("B1",) * 5
        assert data.boundaries == (5.5,)

    def test_equal_frequency_thirds(self):
        table = self.make_table(list(range(1, 10)))
        data = bucketize(table, "reward", n_buckets=3, strategy="equal_frequency")
        counts = {label: data.labels.count(label) for label in set(data.labels)}
        assert counts == {"B0": 3, "B1": 3, "B2": 3}

    def test_bucketized_column_discarded(self):
        table = self.make_table(list(range(1, 11)))
        data = bucketize(table, "reward", n_buckets=2)
        assert "reward" not in data.features
        assert set(data.features) == {"x", "delta_reward"}

    def test_constant_column(self):
        table = self.make_table([3.0] * 6)
        with pytest.raises(ConstantColumn):
            bucketize(table, "reward", n_buckets=2)


class TestInduceRules:
    def test_perfectly_separable(self):
        xs = [-3, -2, -1, 0, 1, 2, 3]
        labels = ["L0" if x <= 0 else "L1" for x in xs]
        ruleset = induce_rules(simple_dataset(xs, labels), max_conditions=3, min_coverage=1)
        assert accuracy(ruleset, simple_dataset(xs, labels)) == 1.0
        assert 1 <= len(ruleset.rules) <= 2

    def test_single_label_only_default(self):
        data = simple_dataset([1, 2, 3], ["L"] * 3)
        ruleset = induce_rules(data)
        assert ruleset.rules == ()
        assert ruleset.default_label == "L"
        assert ruleset.treemap_weights == (1.0,)

    def test_first_rule_covers_largest_population(self):
        xs = [0] * 8 + [10] * 2
        labels = ["A"] * 8 + ["B"] * 2
        ruleset = induce_rules(simple_dataset(xs, labels), min_coverage=1)
        assert ruleset.rules[0].label == "A"
        assert ruleset.rules[0].coverage_count == 8

    def test_sequential_coverage_non_increasing(self):
        rng = np.random.default_rng(5)
        xs = rng.integers(0, 6, size=120).astype(float)
        ys = rng.integers(0, 4, size=120).astype(float)
        labels = tuple(
            "A" if x <= 1 else ("B" if y > 2 else "C") for x, y in zip(xs, ys)
        )
        data = LabeledDataset(
            features=("x", "y"),
            matrix=np.column_stack([xs, ys]),
            labels=labels,
            label_column="action",
        )
        ruleset = induce_rules(data, max_conditions=3, min_coverage=1)
        counts = [r.coverage_count for r in ruleset.rules]
        assert counts == sorted(counts, reverse=True)

    def test_treemap_weights_sum_to_one(self):
        rng = np.random.default_rng(11)
        xs = rng.normal(size=200)
        labels = tuple("P" if x > 0.3 else "N" for x in xs)
        ruleset = induce_rules(simple_dataset(xs.tolist(), labels), min_coverage=2)
        assert sum(ruleset.treemap_weights) == pytest.approx(1.0, abs=1e-12)

    def test_deterministic(self):
        rng = np.random.default_rng(2)
        xs = rng.integers(0, 10, size=80).astype(float)
        labels = tuple("A" if x <= 4 else "B" for x in xs)
        a = induce_rules(simple_dataset(xs.tolist(), labels))
        b = induce_rules(simple_dataset(xs.tolist(), labels))
        assert a == b

    def test_degenerate_data_flagged(self):
        data = simple_dataset([1, 1, 1, 1], ["A", "B", "A", "B"])
        ruleset = induce_rules(data)
        assert ruleset.degenerate
        assert ruleset.rules == ()
        assert ruleset.default_label == "A"  # majority tie broken lexicographically

    def test_fidelity_beats_majority_baseline(self):
        rng = np.random.default_rng(7)
        xs = rng.integers(0, 8, size=150).astype(float)
        noise = rng.random(150)
        labels = tuple(
            ("A" if x <= 3 else "B") if p > 0.1 else ("B" if x <= 3 else "A")
            for x, p in zip(xs, noise)
        )
        data = simple_dataset(xs.tolist(), labels)
        ruleset = induce_rules(data, min_coverage=2)
        majority = max(set(labels), key=list(labels).count)
        baseline = list(labels).count(majority) / len(labels)
        assert accuracy(ruleset, data) >= baseline

    def test_gridworld_policy_fidelity(self, gridworld):
        # label every reachable state with the optimal action, then check
        # the induced rules reproduce at least 90% of those choices
        _, policy = value_iteration(gridworld, gamma=0.95)
        sim_labels = [a.label for a in gridworld.expanded_actions()]
        states = sorted(policy)
        xs = np.asarray(states, dtype=float)
        labels = tuple(sim_labels[policy[s]] for s in states)
        data = LabeledDataset(
            features=("x", "y"), matrix=xs, labels=labels, label_column="action"
        )
        ruleset = induce_rules(data, max_conditions=3, min_coverage=1)
        assert accuracy(ruleset, data) >= 0.9

    def test_conditions_never_reference_label_column(self):
        xs = list(range(1, 11))
        protocols = [protocol_of(0, ["go"] * 10, [(v,) for v in xs], xs)]
        table = concatenate_evaluations(protocols, (0, 0))
        data = bucketize(table, "reward", n_buckets=2)
        ruleset = induce_rules(data, min_coverage=1)
        for rule in ruleset.rules:
            for condition in rule.conditions:
                assert condition.feature != "reward"

    def test_max_conditions_respected(self):
        rng = np.random.default_rng(0)
        matrix = rng.integers(0, 4, size=(100, 3)).astype(float)
        labels = tuple(
            "A" if (r[0] <= 1 and r[1] > 2 and r[2] <= 1) else "B" for r in matrix
        )
        data = LabeledDataset(
            features=("f1", "f2", "f3"), matrix=matrix, labels=labels, label_column="action"
        )
        ruleset = induce_rules(data, max_conditions=2, min_coverage=1)
        assert all(len(r.conditions) <= 2 for r in ruleset.rules)


class TestCoverageStats:
    def test_single_default_rule_weight_one(self):
        data = simple_dataset([1, 2, 3], ["L"] * 3)
        ruleset = induce_rules(data)
        stats = coverage_stats(ruleset, data)
        assert stats.treemap_weights == (1.0,)

    def test_sixty_forty_split(self):
        xs = [0.0] * 6 + [10.0] * 4
        labels = ("A",) * 6 + ("B",) * 4
        data = simple_dataset(xs, labels)
        ruleset = induce_rules(data, min_coverage=1)
        stats = coverage_stats(ruleset, data)
        assert stats.treemap_weights[0] == pytest.approx(0.6)
        assert sum(stats.treemap_weights) == pytest.approx(1.0, abs=1e-12)

    def test_training_data_consistency(self):
        rng = np.random.default_rng(3)
        xs = rng.integers(0, 10, size=60).astype(float)
        labels = tuple("A" if x <= 4 else "B" for x in xs)
        data = simple_dataset(xs.tolist(), labels)
        ruleset = induce_rules(data, min_coverage=1)
        stats = coverage_stats(ruleset, data)
        for i, rule in enumerate(ruleset.rules):
            assert stats.entries[i].covered_count == rule.coverage_count

    def test_schema_mismatch(self):
        data = simple_dataset([1, 2, 3, 4], ["A", "A", "B", "B"])
        ruleset = induce_rules(data, min_coverage=1)
        other = LabeledDataset(
            features=("z",),
            matrix=np.zeros((3, 1)),
            labels=("A", "B", "A"),
            label_column="action",
        )
        with pytest.raises(SchemaMismatch):
            coverage_stats(ruleset, other)

    def test_render_format(self):
        xs = [0.0] * 6 + [10.0] * 4
        labels = ("A",) * 6 + ("B",) * 4
        ruleset = induce_rules(simple_dataset(xs, labels), min_coverage=1)
        text = ruleset.render()
        assert "IF x" in text and "THEN" in text and "coverage" in text

    def test_document_shape(self):
        xs = [0.0] * 6 + [10.0] * 4
        labels = ("A",) * 6 + ("B",) * 4
        ruleset = induce_rules(simple_dataset(xs, labels), min_coverage=1)
        doc = ruleset.to_document()
        assert set(doc) == {"rules", "default_label", "treemap"}
        assert doc["rules"][0]["conditions"][0]["feature"] == "x"
        assert sum(t["weight"] for t in doc["treemap"]) == pytest.approx(1.0)


class TestFirstMatchSemantics:
    def test_exactly_one_rule_fires_per_row(self):
        rng = np.random.default_rng(9)
        xs = rng.integers(0, 12, size=100).astype(float)
        labels = tuple("A" if x <= 3 else ("B" if x <= 7 else "C") for x in xs)
        data = simple_dataset(xs.tolist(), labels)
        ruleset = induce_rules(data, min_coverage=1)
        stats = coverage_stats(ruleset, data)
        assert sum(e.covered_count for e in stats.entries) == len(data)


class TestPolicyTableFromAgent:
    def test_trained_agent_rules_fidelity(self, gridworld):
        result = train(
            gridworld,
            AgentKind.Q_LEARNING,
            {"gamma": 0.95, "alpha": 0.1, "epsilon": 0.5},
            episodes=500,
            seed=3,
        )
        labels_list = [a.label for a in gridworld.expanded_actions()]
        rows = []
        labels = []
        for x in range(5):
            for y in range(5):
                if (x, y) == (4, 4):
                    continue
                rows.append((float(x), float(y)))
                labels.append(labels_list[result.agent.greedy_action((float(x), float(y)))])
        data = LabeledDataset(
            features=("x", "y"),
            matrix=np.asarray(rows),
            labels=tuple(labels),
            label_column="action",
        )
        ruleset = induce_rules(data, max_conditions=3, min_coverage=1)
        assert accuracy(ruleset, data) >= 0.9
