"""Greedy sequential covering: an ordered decision list with a default rule.

Each round grows one conjunctive rule per candidate label on the uncovered
residue (precision-first greedy over axis-aligned threshold atoms), keeps
the best by (correct count, fewer conditions, feature order), removes the
rows it covers, and repeats. The first rule therefore covers the largest
population; later rules explain the residue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import LabeledDataset

OPS = ("<=", ">", "=")


class SchemaMismatch(Exception):
    pass


@dataclass(frozen=True)
class Condition:
    feature: str
    op: str  # "<=", ">", "="
    threshold: float

    def matches(self, value: float) -> bool:
        if self.op == "<=":
            return value <= self.threshold
        if self.op == ">":
            return value > self.threshold
        return value == self.threshold

    def render(self) -> str:
        symbol = {"<=": "≤", ">": ">", "=": "="}[self.op]
        return f"{self.feature} {symbol} {_fmt(self.threshold)}"


@dataclass(frozen=True)
class Rule:
    label: str
    conditions: tuple[Condition, ...]
    coverage_count: int  # rows covered on this rule's residue at induction
    correct_count: int


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...]
    default_label: str
    n_rows: int
    treemap_weights: tuple[float, ...]  # per rule, then the default; sums to 1
    features: tuple[str, ...]
    label_column: str
    degenerate: bool = False  # identical features with mixed labels

    def predict(self, row: np.ndarray) -> str:
        index = self.match_index(row)
        return self.default_label if index == len(self.rules) else self.rules[index].label

    def match_index(self, row: np.ndarray) -> int:
        """Index of the first matching rule; len(rules) means the default."""
        for i, rule in enumerate(self.rules):
            if all(
                c.matches(float(row[self.features.index(c.feature)])) for c in rule.conditions
            ):
                return i
        return len(self.rules)

    def to_document(self) -> dict:
        return {
            "rules": [
                {
                    "label": rule.label,
                    "conditions": [
                        {"feature": c.feature, "op": c.op, "threshold": c.threshold}
                        for c in rule.conditions
                    ],
                    "coverage": rule.coverage_count,
                    "precision": (
                        rule.correct_count / rule.coverage_count if rule.coverage_count else 0.0
                    ),
                }
                for rule in self.rules
            ],
            "default_label": self.default_label,
            "treemap": [
                {"rule_index": (i if i < len(self.rules) else "default"), "weight": w}
                for i, w in enumerate(self.treemap_weights)
            ],
        }

    def render(self) -> str:
        lines = []
        for rule, weight in zip(self.rules, self.treemap_weights):
            conds = " AND ".join(c.render() for c in rule.conditions)
            precision = rule.correct_count / rule.coverage_count if rule.coverage_count else 0.0
            lines.append(
                f"IF {conds} THEN {rule.label} "
                f"(coverage {weight * 100:.0f} %, precision {precision * 100:.0f} %)"
            )
        lines.append(
            f"ELSE {self.default_label} (coverage {self.treemap_weights[-1] * 100:.0f} %)"
        )
        return "\n".join(lines)


def induce_rules(
    data: LabeledDataset, max_conditions: int = 3, min_coverage: int | None = None
) -> RuleSet:
    """Learn an ordered rule list; deterministic for identical inputs."""
    n = len(data)
    if n == 0:
        raise ValueError("dataset is empty")
    if min_coverage is None:
        min_coverage = max(1, n // 100)

    matrix = data.matrix
    labels = np.asarray(data.labels, dtype=object)
    alive = np.ones(n, dtype=bool)
    majority_label = _majority(labels)

    rules: list[Rule] = []
    while True:
        residue_labels = labels[alive]
        if len(residue_labels) == 0 or len(set(residue_labels.tolist())) <= 1:
            break
        best: tuple | None = None
        for label in sorted(set(residue_labels.tolist())):
            grown = _grow_rule(matrix, labels, alive, label, max_conditions, data.features)
            if grown is None:
                continue
            conditions, mask, correct = grown
            # a rule must fit its cover at least as well as the global
            # majority label would, or the decision list could fall below
            # the majority baseline
            if correct < int((labels[mask] == majority_label).sum()):
                continue
            order = (
                -correct,
                len(conditions),
                tuple(c.feature for c in conditions),
                label,
            )
            if best is None or order < best[0]:
                best = (order, label, conditions, mask, correct)
        if best is None:
            break
        _, label, conditions, mask, correct = best
        coverage = int(mask.sum())
        if coverage < min_coverage:
            break
        if rules and coverage > rules[-1].coverage_count:
            break  # keep sequential coverage counts non-increasing
        rules.append(Rule(label, tuple(conditions), coverage, int(correct)))
        alive &= ~mask

    residue_labels = labels[alive]
    if len(residue_labels):
        default_label = _majority(residue_labels)
    else:
        default_label = _majority(labels)

    covered_by_default = int(alive.sum())
    weights = tuple(rule.coverage_count / n for rule in rules) + (covered_by_default / n,)
    degenerate = (
        not rules
        and len(set(labels.tolist())) > 1
        and bool(np.all(matrix == matrix[0]))
    )
    return RuleSet(
        rules=tuple(rules),
        default_label=default_label,
        n_rows=n,
        treemap_weights=weights,
        features=data.features,
        label_column=data.label_column,
        degenerate=degenerate,
    )


def _grow_rule(matrix, labels, alive, target, max_conditions, features):
    """Greedy growth of one conjunction for `target`.

    Atoms are scored by coverage-weighted precision improvement
    (correct * (log precision_after - log precision_before)), which favors
    the largest still-pure refinement instead of tiny perfect splits.
    """
    mask = alive.copy()
    conditions: list[Condition] = []
    while len(conditions) < max_conditions:
        covered = int(mask.sum())
        correct = int((labels[mask] == target).sum())
        if covered and correct == covered:
            break  # pure
        precision = correct / covered if covered else 0.0
        best = None
        for f_index, feature in enumerate(features):
            column = matrix[:, f_index]
            values = np.unique(column[mask])
            thresholds = (values[:-1] + values[1:]) / 2.0
            candidates = [("<=", t) for t in thresholds] + [(">", t) for t in thresholds]
            candidates += [("=", v) for v in values]
            for op, threshold in candidates:
                if op == "<=":
                    sub = mask & (column <= threshold)
                elif op == ">":
                    sub = mask & (column > threshold)
                else:
                    sub = mask & (column == threshold)
                sub_covered = int(sub.sum())
                if sub_covered == 0 or sub_covered == covered:
                    continue
                sub_correct = int((labels[sub] == target).sum())
                if sub_correct == 0:
                    continue
                sub_precision = sub_correct / sub_covered
                if sub_precision <= precision:
                    continue
                gain = sub_correct * (math.log2(sub_precision) - math.log2(precision))
                order = (-gain, -sub_correct, f_index, OPS.index(op), threshold)
                if best is None or order < best[0]:
                    best = (order, op, threshold, feature, sub, sub_correct)
        if best is None:
            break  # no atom improves precision
        _, op, threshold, feature, mask, correct = best
        conditions.append(Condition(feature, op, float(threshold)))
    if not conditions:
        return None
    return conditions, mask, int((labels[mask] == target).sum())


def _majority(values: np.ndarray) -> str:
    counts: dict[str, int] = {}
    for v in values.tolist():
        counts[v] = counts.get(v, 0) + 1
    return min(counts, key=lambda label: (-counts[label], label))


@dataclass(frozen=True)
class CoverageEntry:
    rule_index: int | str  # position, or "default"
    label: str
    covered_count: int
    coverage: float  # first-match fraction of all rows
    precision: float


@dataclass(frozen=True)
class CoverageStats:
    entries: tuple[CoverageEntry, ...]
    treemap_weights: tuple[float, ...]

    def to_document(self) -> dict:
        return {
            "entries": [
                {
                    "rule_index": e.rule_index,
                    "label": e.label,
                    "covered_count": e.covered_count,
                    "coverage": e.coverage,
                    "precision": e.precision,
                }
                for e in self.entries
            ],
            "treemap": [
                {"rule_index": e.rule_index, "weight": w}
                for e, w in zip(self.entries, self.treemap_weights)
            ],
        }


def coverage_stats(ruleset: RuleSet, data: LabeledDataset) -> CoverageStats:
    """First-match coverage fractions and precision per rule over `data`."""
    for rule in ruleset.rules:
        for condition in rule.conditions:
            if condition.feature not in data.features:
                raise SchemaMismatch(f"dataset has no feature {condition.feature!r}")
    n = len(data)
    covered = [0] * (len(ruleset.rules) + 1)
    correct = [0] * (len(ruleset.rules) + 1)
    remap = [data.features.index(f) if f in data.features else None for f in ruleset.features]

    for row_index in range(n):
        row = data.matrix[row_index]
        reordered = np.array(
            [row[r] if r is not None else np.nan for r in remap], dtype=float
        ) if ruleset.features != data.features else row
        index = ruleset.match_index(reordered)
        covered[index] += 1
        predicted = (
            ruleset.default_label if index == len(ruleset.rules) else ruleset.rules[index].label
        )
        if predicted == data.labels[row_index]:
            correct[index] += 1

    entries = []
    for i, rule in enumerate(ruleset.rules):
        entries.append(
            CoverageEntry(
                rule_index=i,
                label=rule.label,
                covered_count=covered[i],
                coverage=covered[i] / n,
                precision=correct[i] / covered[i] if covered[i] else 0.0,
            )
        )
    entries.append(
        CoverageEntry(
            rule_index="default",
            label=ruleset.default_label,
            covered_count=covered[-1],
            coverage=covered[-1] / n,
            precision=correct[-1] / covered[-1] if covered[-1] else 0.0,
        )
    )
    weights = tuple(c / n for c in covered)
    return CoverageStats(entries=tuple(entries), treemap_weights=weights)


def accuracy(ruleset: RuleSet, data: LabeledDataset) -> float:
    hits = sum(
        1
        for i in range(len(data))
        if ruleset.predict(data.matrix[i]) == data.labels[i]
    )
    return hits / len(data)


def _fmt(value: float) -> str:
    if value == int(value):
        return str(int(value))
    return f"{value:g}"
