"""Invariant checks over GymSpec values, reported as findings rather than raises."""

from __future__ import annotations

import math
from collections import Counter

from . import expr as E
from .errors import ExpressionTypeError
from .model import Finding, GymSpec, ValidationReport


def validate(spec: GymSpec) -> ValidationReport:
    """Check every GymSpec invariant; an empty report means the spec is valid."""
    findings: list[Finding] = []

    def add(code: str, path: str, message: str) -> None:
        findings.append(Finding(code, path, message))

    if not spec.state_vars:
        add("NO_STATE_VARS", "state_vars", "at least one state variable is required")
    if not spec.actions:
        add("NO_ACTIONS", "actions", "at least one action is required")
    if not spec.reward_metrics:
        add("NO_METRICS", "reward_metrics", "at least one reward metric is required")
    if spec.max_steps <= 0:
        add("MAX_STEPS_INVALID", "max_steps", "max_steps must be positive")

    for label, names in (
        ("DUPLICATE_STATE_VAR", [v.name for v in spec.state_vars]),
        ("DUPLICATE_ACTION", [a.name for a in spec.actions]),
        ("DUPLICATE_METRIC", [m.name for m in spec.reward_metrics]),
    ):
        for name, count in Counter(names).items():
            if count > 1:
                add(label, name, f"name '{name}' declared {count} times")

    for i, var in enumerate(spec.state_vars):
        path = f"state_vars[{i}]"
        if var.lower > var.upper:
            add("BOUNDS_INVERTED", path, f"lower {var.lower} > upper {var.upper}")
        if var.kind == "integer" and (var.lower != int(var.lower) or var.upper != int(var.upper)):
            add("NONINTEGER_BOUNDS", path, "integer variable requires integer bounds")
        if not (math.isfinite(var.lower) and math.isfinite(var.upper)):
            add("NONFINITE_BOUNDS", path, "bounds must be finite")

    var_names = {v.name for v in spec.state_vars}
    action_names = {a.name for a in spec.actions}
    base_scope = var_names | {"step"}
    all_params = {p.name for a in spec.actions for p in a.params}

    for i, action in enumerate(spec.actions):
        seen = Counter(p.name for p in action.params)
        for name, count in seen.items():
            if count > 1:
                add("DUPLICATE_PARAM", f"actions[{i}]", f"parameter '{name}' declared {count} times")
        for j, param in enumerate(action.params):
            if not param.values:
                add("EMPTY_PARAM_VALUES", f"actions[{i}].params[{j}]", "value set must be nonempty")

    for i, rule in enumerate(spec.transition):
        path = f"transition[{i}]"
        if rule.action_name not in action_names:
            add("UNKNOWN_ACTION_RULE", path, f"no action named '{rule.action_name}'")
        action = next((a for a in spec.actions if a.name == rule.action_name), None)
        scope = base_scope | ({p.name for p in action.params} if action else all_params)
        assigned = Counter(var for var, _ in rule.assignments)
        for var, count in assigned.items():
            if count > 1:
                add("DUPLICATE_ASSIGNMENT", f"{path}.assign.{var}", f"'{var}' assigned {count} times")
            if var not in var_names:
                add("UNKNOWN_ASSIGNED_VAR", f"{path}.assign.{var}", f"no state variable '{var}'")
        for var, expression in rule.assignments:
            _check_expr(expression, scope, E.NUMBER, f"{path}.assign.{var}", add)

    metric_scope = base_scope | all_params
    for i, metric in enumerate(spec.reward_metrics):
        path = f"reward_metrics[{i}]"
        if not math.isfinite(metric.weight):
            add("NONFINITE_WEIGHT", f"{path}.weight", "weight must be finite")
        _check_expr(metric.expression, metric_scope, E.NUMBER, f"{path}.expression", add)

    _check_expr(spec.termination, base_scope, E.BOOLEAN, "termination", add)

    initial = dict(spec.initial_state)
    if len(initial) != len(spec.initial_state):
        add("INITIAL_DUPLICATE", "initial_state", "a variable is assigned more than once")
    for var in spec.state_vars:
        if var.name not in initial:
            add("INITIAL_MISSING", f"initial_state.{var.name}", "no initial value")
            continue
        value = initial[var.name]
        if not (var.lower <= value <= var.upper):
            add(
                "INITIAL_OUT_OF_BOUNDS",
                f"initial_state.{var.name}",
                f"value {value} outside [{var.lower}, {var.upper}]",
            )
        if var.kind == "integer" and value != int(value):
            add("INITIAL_NOT_INTEGER", f"initial_state.{var.name}", f"value {value} is not integral")
    for name in initial:
        if name not in var_names:
            add("INITIAL_UNKNOWN_VAR", f"initial_state.{name}", f"no state variable '{name}'")

    return ValidationReport(tuple(findings))


def _check_expr(expression: E.Expr, scope: set[str], want: str, path: str, add) -> None:
    for ident in sorted(E.free_names(expression)):
        if ident not in scope:
            add("UNRESOLVED_REFERENCE", path, f"unresolved identifier '{ident}'")
            return
    try:
        got = E.infer_type(expression, scope)
    except ExpressionTypeError as exc:
        add("TYPE_ERROR", path, str(exc))
        return
    if got != want:
        add("TYPE_ERROR", path, f"expression must be {want}, found {got}")
