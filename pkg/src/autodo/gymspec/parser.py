"""Parsing and serialization of the external gym document format.

Documents are UTF-8 JSON objects with top-level keys ``name, description,
state_vars, actions, transition, reward_metrics, termination, max_steps,
initial_state``; all expressions are stored as strings in the DSL grammar.
"""

from __future__ import annotations

import json
from typing import Any

from . import expr as E
from .errors import ParseError, SchemaError
from .model import (
    ActionDef,
    ActionParam,
    GymSpec,
    RewardMetric,
    StateVar,
    TransitionRule,
)

_TOP_KEYS = {
    "name",
    "description",
    "state_vars",
    "actions",
    "transition",
    "reward_metrics",
    "termination",
    "max_steps",
    "initial_state",
}


def _require(obj: dict, key: str, path: str) -> Any:
    if key not in obj:
        raise SchemaError(f"missing field '{path}.{key}'" if path else f"missing field '{key}'")
    return obj[key]


def _check_keys(obj: dict, allowed: set[str], path: str) -> None:
    extra = set(obj) - allowed
    if extra:
        name = sorted(extra)[0]
        raise SchemaError(f"unexpected field '{path}.{name}'" if path else f"unexpected field '{name}'")


def _as_str(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(f"field '{path}' must be a string")
    return value


def _as_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"field '{path}' must be a number")
    return float(value)


def _as_list(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(f"field '{path}' must be a list")
    return value


def _parse_expr(source: Any, path: str) -> E.Expr:
    text = _as_str(source, path)
    try:
        return E.parse_expression(text)
    except ParseError as exc:
        raise ParseError(f"in '{path}': {exc.args[0]}", exc.position) from exc


def parse_document(doc: dict) -> GymSpec:
    """Build a GymSpec from an already-decoded JSON object tree."""
    if not isinstance(doc, dict):
        raise SchemaError("document must be an object")
    _check_keys(doc, _TOP_KEYS, "")

    name = _as_str(_require(doc, "name", ""), "name")
    description = _as_str(doc.get("description", ""), "description")

    state_vars = []
    for i, item in enumerate(_as_list(_require(doc, "state_vars", ""), "state_vars")):
        path = f"state_vars[{i}]"
        if not isinstance(item, dict):
            raise SchemaError(f"field '{path}' must be an object")
        _check_keys(item, {"name", "kind", "lower", "upper"}, path)
        kind = _as_str(_require(item, "kind", path), f"{path}.kind")
        if kind not in ("integer", "real"):
            raise SchemaError(f"field '{path}.kind' must be 'integer' or 'real'")
        state_vars.append(
            StateVar(
                name=_as_str(_require(item, "name", path), f"{path}.name"),
                kind=kind,
                lower=_as_number(_require(item, "lower", path), f"{path}.lower"),
                upper=_as_number(_require(item, "upper", path), f"{path}.upper"),
            )
        )

    actions = []
    for i, item in enumerate(_as_list(_require(doc, "actions", ""), "actions")):
        path = f"actions[{i}]"
        if not isinstance(item, dict):
            raise SchemaError(f"field '{path}' must be an object")
        _check_keys(item, {"name", "params"}, path)
        params = []
        for j, p in enumerate(_as_list(item.get("params", []), f"{path}.params")):
            ppath = f"{path}.params[{j}]"
            if not isinstance(p, dict):
                raise SchemaError(f"field '{ppath}' must be an object")
            _check_keys(p, {"name", "values"}, ppath)
            values = tuple(
                _as_number(v, f"{ppath}.values[{k}]")
                for k, v in enumerate(_as_list(_require(p, "values", ppath), f"{ppath}.values"))
            )
            params.append(ActionParam(_as_str(_require(p, "name", ppath), f"{ppath}.name"), values))
        actions.append(ActionDef(_as_str(_require(item, "name", path), f"{path}.name"), tuple(params)))

    transition = []
    for i, item in enumerate(_as_list(_require(doc, "transition", ""), "transition")):
        path = f"transition[{i}]"
        if not isinstance(item, dict):
            raise SchemaError(f"field '{path}' must be an object")
        _check_keys(item, {"action", "assign"}, path)
        assign = _require(item, "assign", path)
        if not isinstance(assign, dict):
            raise SchemaError(f"field '{path}.assign' must be an object")
        assignments = tuple(
            (var, _parse_expr(src, f"{path}.assign.{var}")) for var, src in assign.items()
        )
        transition.append(
            TransitionRule(_as_str(_require(item, "action", path), f"{path}.action"), assignments)
        )

    reward_metrics = []
    for i, item in enumerate(_as_list(_require(doc, "reward_metrics", ""), "reward_metrics")):
        path = f"reward_metrics[{i}]"
        if not isinstance(item, dict):
            raise SchemaError(f"field '{path}' must be an object")
        _check_keys(item, {"name", "weight", "expression"}, path)
        reward_metrics.append(
            RewardMetric(
                name=_as_str(_require(item, "name", path), f"{path}.name"),
                weight=_as_number(_require(item, "weight", path), f"{path}.weight"),
                expression=_parse_expr(_require(item, "expression", path), f"{path}.expression"),
            )
        )

    termination = _parse_expr(_require(doc, "termination", ""), "termination")

    max_steps = _require(doc, "max_steps", "")
    if isinstance(max_steps, bool) or not isinstance(max_steps, int):
        raise SchemaError("field 'max_steps' must be an integer")

    initial = _require(doc, "initial_state", "")
    if not isinstance(initial, dict):
        raise SchemaError("field 'initial_state' must be an object")
    initial_state = tuple(
        (k, _as_number(v, f"initial_state.{k}")) for k, v in initial.items()
    )

    spec = GymSpec(
        name=name,
        description=description,
        state_vars=tuple(state_vars),
        actions=tuple(actions),
        transition=tuple(transition),
        reward_metrics=tuple(reward_metrics),
        termination=termination,
        max_steps=max_steps,
        initial_state=initial_state,
    )
    _check_references(spec)
    return spec


def _check_references(spec: GymSpec) -> None:
    """Every identifier must resolve; unresolved names are schema errors."""
    var_names = {v.name for v in spec.state_vars}
    base = var_names | {"step"}
    param_names = {p.name for a in spec.actions for p in a.params}

    for i, rule in enumerate(spec.transition):
        action = next((a for a in spec.actions if a.name == rule.action_name), None)
        scope = base | ({p.name for p in action.params} if action else param_names)
        for var, expression in rule.assignments:
            for ident in sorted(E.free_names(expression)):
                if ident not in scope:
                    raise SchemaError(
                        f"unresolved identifier '{ident}' in 'transition[{i}].assign.{var}'"
                    )
    for i, metric in enumerate(spec.reward_metrics):
        for ident in sorted(E.free_names(metric.expression)):
            if ident not in base | param_names:
                raise SchemaError(
                    f"unresolved identifier '{ident}' in 'reward_metrics[{i}].expression'"
                )
    for ident in sorted(E.free_names(spec.termination)):
        if ident not in base:
            raise SchemaError(f"unresolved identifier '{ident}' in 'termination'")


def parse_spec(document: str) -> GymSpec:
    """Parse external document text into a GymSpec.

    Raises ParseError (position-annotated) for malformed JSON or DSL text and
    SchemaError for missing/extra fields or unresolved identifiers.
    """
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid document: {exc.msg}", exc.pos) from exc
    return parse_document(doc)


def to_document(spec: GymSpec) -> dict:
    """Serialize a GymSpec to the external JSON object tree."""
    return {
        "name": spec.name,
        "description": spec.description,
        "state_vars": [
            {"name": v.name, "kind": v.kind, "lower": _num(v.lower), "upper": _num(v.upper)}
            for v in spec.state_vars
        ],
        "actions": [
            {
                "name": a.name,
                "params": [
                    {"name": p.name, "values": [_num(v) for v in p.values]} for p in a.params
                ],
            }
            for a in spec.actions
        ],
        "transition": [
            {
                "action": r.action_name,
                "assign": {var: E.unparse(expression) for var, expression in r.assignments},
            }
            for r in spec.transition
        ],
        "reward_metrics": [
            {"name": m.name, "weight": _num(m.weight), "expression": E.unparse(m.expression)}
            for m in spec.reward_metrics
        ],
        "termination": E.unparse(spec.termination),
        "max_steps": spec.max_steps,
        "initial_state": {k: _num(v) for k, v in spec.initial_state},
    }


def serialize(spec: GymSpec, indent: int | None = 2) -> str:
    return json.dumps(to_document(spec), indent=indent)


def _num(value: float) -> float | int:
    if isinstance(value, float) and value == int(value) and abs(value) < 1e16:
        return int(value)
    return value
