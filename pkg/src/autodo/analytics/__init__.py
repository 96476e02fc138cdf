"""Agent-behavior analytics: matrices, graphs, clustering, layouts, tours."""

from .clustering import StateClustering, TooFewStates, cluster_states, distinct_states
from .layout import (
    DegenerateInput,
    GraphLayout,
    MissingCoordinates,
    agent_tour,
    graph_layout,
    hop_distances,
    layout,
    stress,
)
from .matrices import (
    EmptyProtocol,
    TemporalTransitionGraph,
    TransitionMatrix,
    UnassignedState,
    action_transition_matrix,
    clustered_matrix,
    filter_states,
    state_transition_matrix,
    temporal_graph,
)

__all__ = [
    "DegenerateInput",
    "EmptyProtocol",
    "GraphLayout",
    "MissingCoordinates",
    "StateClustering",
    "TemporalTransitionGraph",
    "TooFewStates",
    "TransitionMatrix",
    "UnassignedState",
    "action_transition_matrix",
    "agent_tour",
    "cluster_states",
    "clustered_matrix",
    "distinct_states",
    "filter_states",
    "graph_layout",
    "hop_distances",
    "layout",
    "state_transition_matrix",
    "stress",
    "temporal_graph",
]
