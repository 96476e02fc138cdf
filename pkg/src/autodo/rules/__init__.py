"""Surrogate rule sets approximating agent policies."""

from .dataset import (
    ACTION_COLUMN,
    ConstantColumn,
    EmptyInterval,
    LabeledDataset,
    RowTable,
    bucketize,
    concatenate_evaluations,
)
from .induction import (
    Condition,
    CoverageEntry,
    CoverageStats,
    Rule,
    RuleSet,
    SchemaMismatch,
    accuracy,
    coverage_stats,
    induce_rules,
)

__all__ = [
    "ACTION_COLUMN",
    "Condition",
    "ConstantColumn",
    "CoverageEntry",
    "CoverageStats",
    "EmptyInterval",
    "LabeledDataset",
    "Rule",
    "RuleSet",
    "RowTable",
    "SchemaMismatch",
    "accuracy",
    "bucketize",
    "concatenate_evaluations",
    "coverage_stats",
    "induce_rules",
]
