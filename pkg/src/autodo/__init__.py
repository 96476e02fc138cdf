"""AutoDO: desk-scale automated decision optimization with tabular RL.

Compose environments declaratively, search the joint agent/hyperparameter
space, track runs through a streaming controller, and explain agent behavior
with transition matrices, graph layouts, and surrogate rule sets.
"""

__version__ = "0.1.0"
