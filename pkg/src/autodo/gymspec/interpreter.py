"""Reference interpreter for gym specifications.

All semantics live here; the code generator must agree with this module on
every trace. Assignments are evaluated simultaneously against the pre-step
state, results are rounded (integer vars, half away from zero) and clamped
to the declared bounds, and the total reward is the weighted metric sum
over the post-step state.
"""

from __future__ import annotations

import math

from . import expr as E
from .errors import EpisodeFinished, InvalidSpec, UnknownAction
from .model import ConcreteAction, EnvState, GymSpec, StateVar
from .validate import validate


def round_half_away(value: float) -> float:
    """Round to the nearest integer, halves away from zero."""
    return float(math.floor(value + 0.5)) if value >= 0 else float(math.ceil(value - 0.5))


def clamp_value(var: StateVar, value: float) -> float:
    if var.kind == "integer":
        value = round_half_away(value)
    return float(min(max(value, var.lower), var.upper))


class Simulator:
    """Pre-resolved view of a spec for hot loops.

    reset()/step() below are thin wrappers over one of these; construct a
    Simulator directly when running many episodes.
    """

    def __init__(self, spec: GymSpec, validated: bool = False):
        if not validated:
            report = validate(spec)
            if not report.ok:
                raise InvalidSpec(f"spec has {len(report.findings)} finding(s): {report.codes()}")
        self.spec = spec
        self.actions = spec.expanded_actions()
        self.labels = [a.label for a in self.actions]
        self._by_label = {a.label: i for i, a in enumerate(self.actions)}
        self._rules = {a.name: spec.rules_for(a.name) for a in spec.actions}
        self._param_names = sorted({p.name for a in spec.actions for p in a.params})

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    def action_index(self, action: ConcreteAction | str) -> int:
        label = action.label if isinstance(action, ConcreteAction) else action
        try:
            return self._by_label[label]
        except KeyError:
            raise UnknownAction(f"action {label!r} is not in the expanded action set") from None

    def reset(self) -> EnvState:
        initial = dict(self.spec.initial_state)
        values = tuple((v.name, float(initial[v.name])) for v in self.spec.state_vars)
        return EnvState(values=values, step=0, done=False)

    def terminated(self, state: EnvState) -> bool:
        """Termination criterion alone, ignoring the step horizon."""
        env = state.as_dict()
        env["step"] = float(state.step)
        return bool(E.evaluate(self.spec.termination, env))

    def step(
        self, state: EnvState, action: ConcreteAction | str | int
    ) -> tuple[EnvState, float, dict[str, float]]:
        if state.done:
            raise EpisodeFinished(f"episode already finished at step {state.step}")
        index = action if isinstance(action, int) else self.action_index(action)
        if not 0 <= index < len(self.actions):
            raise UnknownAction(f"action index {index} out of range")
        concrete = self.actions[index]
        spec = self.spec

        pre = state.as_dict()
        env = dict(pre)
        env["step"] = float(state.step)
        env.update(concrete.env())

        # simultaneous update: all expressions see the pre-step state
        new_values = dict(pre)
        for rule in self._rules[concrete.name]:
            updates = {var: E.evaluate(expression, env) for var, expression in rule.assignments}
            new_values.update(updates)

        for var in spec.state_vars:
            new_values[var.name] = clamp_value(var, float(new_values[var.name]))

        new_step = state.step + 1
        metric_env = dict(new_values)
        metric_env["step"] = float(new_step)
        for name in self._param_names:
            metric_env.setdefault(name, 0.0)
        metric_env.update(concrete.env())

        metrics: dict[str, float] = {}
        reward = 0.0
        for metric in spec.reward_metrics:
            value = float(E.evaluate(metric.expression, metric_env))
            metrics[metric.name] = value
            reward += metric.weight * value

        term_env = dict(new_values)
        term_env["step"] = float(new_step)
        done = bool(E.evaluate(spec.termination, term_env)) or new_step >= spec.max_steps

        new_state = EnvState(
            values=tuple((v.name, new_values[v.name]) for v in spec.state_vars),
            step=new_step,
            done=done,
        )
        return new_state, reward, metrics


def reset(spec: GymSpec) -> EnvState:
    """Initial state at step 0; deterministic. Raises InvalidSpec on findings."""
    return Simulator(spec).reset()


def step(
    spec: GymSpec, state: EnvState, action: ConcreteAction | str
) -> tuple[EnvState, float, dict[str, float]]:
    """Apply one action; returns (new state, reward, per-metric values).

    Raises EpisodeFinished, UnknownAction, or DivisionByZero (the episode is
    then the caller's to mark failed).
    """
    return Simulator(spec, validated=True).step(state, action)
