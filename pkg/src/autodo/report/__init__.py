"""File-based figure rendering for the CLI report path."""

from .figures import layout_figure, leaderboard, matrix_heatmap, reward_curves, rules_figure

__all__ = ["layout_figure", "leaderboard", "matrix_heatmap", "reward_curves", "rules_figure"]
