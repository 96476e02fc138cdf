from __future__ import annotations

import random

import numpy as np
import pytest

from autodo.analytics import (
    DegenerateInput,
    EmptyProtocol,
    MissingCoordinates,
    StateClustering,
    TooFewStates,
    action_transition_matrix,
    agent_tour,
    cluster_states,
    clustered_matrix,
    filter_states,
    graph_layout,
    hop_distances,
    layout,
    state_transition_matrix,
    temporal_graph,
)
from autodo.engine import labeled_protocol
from autodo.engine.protocol import from_rows

# the worked example: seven rows of actions/states/cumulative rewards
TABLE_ACTIONS = ["A1", "A2", "A3", "A1", "A3", "A2", "A3"]
TABLE_STATES = ["S1", "S3", "S1", "S4", "S2", "S1", "S3"]
TABLE_REWARDS = [72.0, 75.0, 74.0, 78.0, 81.0, 80.0, 82.0]


@pytest.fixture
def worked_protocol():
    return labeled_protocol(0, TABLE_ACTIONS, TABLE_STATES, TABLE_REWARDS)


def vector_protocol(episode, states, rewards=None, actions=None, columns=("x",)):
    rewards = rewards or [float(i) for i in range(len(states))]
    actions = actions or ["a"] * len(states)
    rows = [
        (i, actions[i], tuple(float(v) for v in states[i]), rewards[i])
        for i in range(len(states))
    ]
    return from_rows(episode, rows, columns=columns)


class TestStateMatrix:
    def test_worked_example(self, worked_protocol):
        matrix = state_transition_matrix([worked_protocol])
        expected = {
            ("S1", "S3"): 2,
            ("S1", "S4"): 1,
            ("S2", "S1"): 1,
            ("S3", "S1"): 1,
            ("S4", "S2"): 1,
        }
        for a in matrix.labels:
            for b in matrix.labels:
                assert matrix.count(a, b) == expected.get((a, b), 0)
        assert matrix.total == 6

    def test_labels_first_appearance(self, worked_protocol):
        matrix = state_transition_matrix([worked_protocol])
        assert matrix.labels == ("S1", "S3", "S4", "S2")

    def test_single_row_protocol(self):
        protocol = labeled_protocol(0, ["A1"], ["S1"], [1.0])
        matrix = state_transition_matrix([protocol])
        assert matrix.labels == ("S1",)
        assert matrix.total == 0

    def test_two_episodes_double_counts(self, worked_protocol):
        second = labeled_protocol(1, TABLE_ACTIONS, TABLE_STATES, TABLE_REWARDS)
        matrix = state_transition_matrix([worked_protocol, second])
        single = state_transition_matrix([worked_protocol])
        assert np.array_equal(matrix.counts, 2 * single.counts)
        assert matrix.total == 12  # episode boundary contributes no transition

    def test_empty_raises(self):
        with pytest.raises(EmptyProtocol):
            state_transition_matrix([])

    def test_vector_identity_unifies_labels(self):
        # same vectors in two protocols aggregate into one label space
        p1 = vector_protocol(0, [(0,), (1,)])
        p2 = vector_protocol(1, [(1,), (0,)])
        matrix = state_transition_matrix([p1, p2])
        assert matrix.labels == ("S1", "S2")
        assert matrix.count("S1", "S2") == 1
        assert matrix.count("S2", "S1") == 1


class TestActionMatrix:
    def test_worked_example(self, worked_protocol):
        matrix = action_transition_matrix([worked_protocol])
        expected = {
            ("A1", "A2"): 1,
            ("A1", "A3"): 1,
            ("A2", "A3"): 2,
            ("A3", "A1"): 1,
            ("A3", "A2"): 1,
        }
        for a in matrix.labels:
            for b in matrix.labels:
                assert matrix.count(a, b) == expected.get((a, b), 0)

    def test_constant_action_diagonal(self):
        protocol = labeled_protocol(0, ["A1"] * 5, [f"S{i}" for i in range(5)], list(range(5)))
        matrix = action_transition_matrix([protocol])
        assert matrix.count("A1", "A1") == 4

    def test_reversed_protocol_transposes(self, worked_protocol):
        reversed_protocol = labeled_protocol(
            0, TABLE_ACTIONS[::-1], TABLE_STATES[::-1], TABLE_REWARDS
        )
        forward = action_transition_matrix([worked_protocol])
        backward = action_transition_matrix([reversed_protocol])
        for a in forward.labels:
            for b in forward.labels:
                assert forward.count(a, b) == backward.count(b, a)


class TestTemporalGraph:
    def test_worked_example(self, worked_protocol):
        graph = temporal_graph(worked_protocol)
        assert graph.edges == (
            ("S1", "S3", 1),
            ("S3", "S1", 2),
            ("S1", "S4", 3),
            ("S4", "S2", 4),
            ("S2", "S1", 5),
            ("S1", "S3", 6),
        )

    def test_one_row_no_edges(self):
        graph = temporal_graph(labeled_protocol(0, ["A1"], ["S1"], [0.0]))
        assert graph.nodes == ("S1",) and graph.edges == ()

    def test_edge_count(self):
        protocol = labeled_protocol(0, ["A1"] * 9, [f"S{i}" for i in range(9)], list(range(9)))
        assert len(temporal_graph(protocol).edges) == 8


class TestClustering:
    def test_identity_clustering_matches_state_matrix(self, worked_protocol):
        clustering = cluster_states(
            [vector_protocol(0, [(0.0,), (2.0,), (0.0,), (3.0,), (1.0,), (0.0,), (2.0,)])], k=4, seed=0
        )
        assert set(clustering.assignment.values()) == {0, 1, 2, 3}

    def test_k_too_large(self):
        protocol = vector_protocol(0, [(0.0,), (1.0,)])
        with pytest.raises(TooFewStates):
            cluster_states([protocol], k=3)

    def test_separated_clouds(self):
        rng = random.Random(0)
        states = [(rng.uniform(0, 1), rng.uniform(0, 1)) for _ in range(10)]
        states += [(rng.uniform(100, 101), rng.uniform(100, 101)) for _ in range(10)]
        protocol = vector_protocol(0, states, columns=("x", "y"))
        clustering = cluster_states([protocol], k=2, seed=1)
        low = {clustering.assignment[f"S{i + 1}"] for i in range(10)}
        high = {clustering.assignment[f"S{i + 11}"] for i in range(10)}
        assert len(low) == 1 and len(high) == 1 and low != high

    def test_deterministic(self):
        rng = random.Random(3)
        states = [(rng.uniform(0, 5), rng.uniform(0, 5)) for _ in range(30)]
        protocol = vector_protocol(0, states, columns=("x", "y"))
        a = cluster_states([protocol], k=5, seed=9)
        b = cluster_states([protocol], k=5, seed=9)
        assert a.assignment == b.assignment
        assert np.array_equal(a.centroids, b.centroids)

    def test_no_empty_clusters(self):
        # 3 tight groups but k=5 forces splits; all clusters stay populated
        states = [(0.0, 0.0)] * 1 + [(10.0, 0.0)] * 1 + [(0.0, 10.0)] * 1
        states += [(0.1, 0.1), (10.1, 0.1), (0.1, 10.1), (5.0, 5.0)]
        protocol = vector_protocol(0, states, columns=("x", "y"))
        clustering = cluster_states([protocol], k=5, seed=2)
        assert set(clustering.assignment.values()) == set(range(5))


class TestClusteredMatrix:
    def test_worked_example_grouping(self, worked_protocol):
        clustering = StateClustering(
            k=2,
            assignment={"S1": 0, "S2": 0, "S3": 1, "S4": 1},
            centroids=np.zeros((2, 1)),
            seed=0,
        )
        matrix = clustered_matrix([worked_protocol], clustering)
        assert matrix.count("C1", "C2") == 3
        assert matrix.count("C2", "C1") == 2
        assert matrix.count("C1", "C1") == 1
        assert matrix.count("C2", "C2") == 0
        assert matrix.total == 6

    def test_all_states_one_cluster(self, worked_protocol):
        clustering = StateClustering(
            k=1,
            assignment={s: 0 for s in "S1 S2 S3 S4".split()},
            centroids=np.zeros((1, 1)),
            seed=0,
        )
        matrix = clustered_matrix([worked_protocol], clustering)
        assert matrix.counts.shape == (1, 1)
        assert matrix.total == 6

    def test_unassigned_state(self, worked_protocol):
        clustering = StateClustering(
            k=1, assignment={"S1": 0}, centroids=np.zeros((1, 1)), seed=0
        )
        with pytest.raises(Exception) as err:
            clustered_matrix([worked_protocol], clustering)
        assert "S3" in str(err.value) or "missing" in str(err.value)

    def test_identity_clustering_is_permutation(self):
        protocol = vector_protocol(0, [(0.0,), (2.0,), (0.0,), (1.0,), (2.0,)])
        clustering = cluster_states([protocol], k=3, seed=0)
        raw = state_transition_matrix([protocol])
        grouped = clustered_matrix([protocol], clustering)
        assert grouped.total == raw.total
        # identity clustering: the multiset of nonzero counts is preserved
        assert sorted(raw.counts.flatten()) == sorted(grouped.counts.flatten())

    def test_mass_conservation_property(self):
        rng = random.Random(42)
        for _ in range(200):
            n_states = rng.randint(2, 8)
            length = rng.randint(1, 30)
            states = [(float(rng.randrange(n_states)),) for _ in range(length)]
            protocol = vector_protocol(0, states)
            raw = state_transition_matrix([protocol])
            k = rng.randint(1, len(raw.labels))
            assignment = {label: rng.randrange(k) for label in raw.labels}
            # ensure surjective onto [0, k)
            for cid, label in zip(range(k), raw.labels):
                assignment[label] = cid
            clustering = StateClustering(
                k=k, assignment=assignment, centroids=np.zeros((k, 1)), seed=0
            )
            grouped = clustered_matrix([protocol], clustering)
            assert grouped.total == raw.total == len(protocol.rows) - 1


class TestFilterStates:
    def test_true_predicate_identity(self, worked_protocol):
        out = filter_states([worked_protocol], lambda row: True)
        assert len(out) == 1 and out[0].rows == worked_protocol.rows

    def test_false_predicate_empty(self, worked_protocol):
        assert filter_states([worked_protocol], lambda row: False) == []

    def test_dropping_middle_row_splits_segments(self):
        protocol = labeled_protocol(
            0, ["A"] * 5, ["S1", "S2", "S3", "S4", "S5"], [1, 2, 3, 4, 5]
        )
        out = filter_states([protocol], lambda row: row.state_label != "S3")
        assert len(out) == 2
        assert [r.state_label for r in out[0].rows] == ["S1", "S2"]
        assert [r.state_label for r in out[1].rows] == ["S4", "S5"]
        matrix = state_transition_matrix(out)
        assert matrix.total == 2  # transitions 2-3 and 3-4 removed

    def test_reward_predicate(self, worked_protocol):
        out = filter_states([worked_protocol], lambda row: row.reward >= 75.0)
        for protocol in out:
            assert all(row.reward >= 75.0 for row in protocol.rows)


class TestLayout:
    def test_two_nodes_unit_distance(self):
        d = np.array([[0.0, 1.0], [1.0, 0.0]])
        result = layout(["a", "b"], d, dims=2, max_iter=300, seed=1)
        gap = np.linalg.norm(
            np.array(result.coords["a"]) - np.array(result.coords["b"])
        )
        assert gap == pytest.approx(1.0, abs=1e-6)
        assert result.final_stress < 1e-6

    def test_unit_square_embeds_exactly(self):
        pts = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)
        d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
        result = layout(list("abcd"), d, dims=2, max_iter=1000, seed=1)
        assert result.final_stress < 1e-6

    def test_k4_not_embeddable_monotone(self):
        d = np.ones((4, 4)) - np.eye(4)
        result = layout(list("abcd"), d, dims=2, max_iter=300, seed=0)
        assert result.final_stress > 1e-3
        trace = result.stress_trace
        for before, after in zip(trace, trace[1:]):
            assert after <= before + 1e-12 * max(trace[0], 1.0)
        # equilateral-ish: best known K4-in-2D stress is about 0.17 with unit weights
        assert result.final_stress == pytest.approx(0.1716, abs=0.01)

    def test_monotone_on_random_graphs(self):
        violations = 0
        for trial in range(100):
            rng = np.random.default_rng(trial)
            n = int(rng.integers(3, 12))
            base = rng.random((n, 2)) * 3
            d = np.linalg.norm(base[:, None, :] - base[None, :, :], axis=2)
            d = d + rng.random((n, n)) * 0.5
            d = (d + d.T) / 2
            np.fill_diagonal(d, 0.0)
            result = layout([str(i) for i in range(n)], d, dims=2, max_iter=200, seed=trial)
            trace = result.stress_trace
            slack = 1e-12 * max(trace[0], 1.0)  # float rounding near zero stress
            for before, after in zip(trace, trace[1:]):
                if after > before + slack:
                    violations += 1
                    break
        assert violations == 0

    def test_three_dims(self):
        pts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], float)
        d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
        result = layout(list("abcd"), d, dims=3, max_iter=800, seed=1)
        assert result.dims == 3
        assert all(len(p) == 3 for p in result.coords.values())
        assert result.final_stress < 1e-5

    def test_degenerate_input(self):
        with pytest.raises(DegenerateInput):
            layout(["a", "b"], np.zeros((2, 2)), dims=2)

    def test_single_node(self):
        result = layout(["only"], np.zeros((1, 1)), dims=2)
        assert result.final_stress == 0.0

    def test_hop_distances(self, worked_protocol):
        matrix = state_transition_matrix([worked_protocol])
        d = hop_distances(matrix)
        assert d.shape == (4, 4)
        assert np.allclose(d, d.T)
        assert np.all(np.diag(d) == 0)
        i, j = matrix.labels.index("S1"), matrix.labels.index("S3")
        assert d[i, j] == 1.0

    def test_graph_layout_end_to_end(self, worked_protocol):
        matrix = state_transition_matrix([worked_protocol])
        result = graph_layout(matrix, dims=2, seed=0)
        assert set(result.coords) == set(matrix.labels)


class TestAgentTour:
    def test_three_step_weights(self):
        protocol = labeled_protocol(0, ["A", "A", "A", "A"], ["S1", "S2", "S3", "S4"], [1, 2, 3, 4])
        matrix = state_transition_matrix([protocol])
        result = graph_layout(matrix, seed=0)
        tour = agent_tour(protocol, result)
        assert [w for _, _, w in tour] == pytest.approx([1 / 3, 2 / 3, 1.0])

    def test_worked_example_tour(self, worked_protocol):
        matrix = state_transition_matrix([worked_protocol])
        result = graph_layout(matrix, seed=0)
        tour = agent_tour(worked_protocol, result)
        assert len(tour) == 6
        assert tour[-1][:2] == ("S1", "S3")
        assert tour[-1][2] == 1.0
        weights = [w for _, _, w in tour]
        assert all(b > a for a, b in zip(weights, weights[1:]))

    def test_empty_protocol_empty_tour(self):
        from autodo.engine import EvaluationProtocol

        protocol = EvaluationProtocol(0, ())
        matrix_layout = graph_layout(
            state_transition_matrix([labeled_protocol(0, ["A"], ["S1"], [0.0])]), seed=0
        )
        assert agent_tour(protocol, matrix_layout) == []

    def test_missing_coordinates(self, worked_protocol):
        partial = graph_layout(
            state_transition_matrix([labeled_protocol(0, ["A"], ["S1"], [0.0])]), seed=0
        )
        with pytest.raises(MissingCoordinates):
            agent_tour(worked_protocol, partial)


class TestLabelStability:
    def test_rerun_reproduces_identical_matrices(self, worked_protocol):
        first = state_transition_matrix([worked_protocol])
        second = state_transition_matrix([worked_protocol])
        assert first.labels == second.labels
        assert np.array_equal(first.counts, second.counts)

    def test_cross_industry_template_counts_once_per_subtree(self):
        from autodo.catalog import Catalog

        catalog = Catalog()
        entry = catalog.template("machine_maintenance")
        assert {"naics:8113", "naics:31", "naics:22"} <= set(entry.category_ids)
        assert catalog.template_count("naics:81") >= 1
        assert catalog.template_count("naics:31") >= 1
        assert catalog.template_count("naics:22") >= 1
