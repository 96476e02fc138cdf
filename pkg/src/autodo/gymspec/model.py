"""Domain types for declarative gym specifications."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import expr as E

STEP_SYMBOL = "step"

INTEGER = "integer"
REAL = "real"


@dataclass(frozen=True)
class StateVar:
    name: str
    kind: str  # INTEGER or REAL
    lower: float
    upper: float


@dataclass(frozen=True)
class ActionParam:
    name: str
    values: tuple[float, ...]  # discrete, nonempty


@dataclass(frozen=True)
class ActionDef:
    name: str
    params: tuple[ActionParam, ...] = ()  # empty means an atomic action


@dataclass(frozen=True)
class ConcreteAction:
    """One element of the expanded action set: a name plus bound parameters."""

    name: str
    bindings: tuple[tuple[str, float], ...] = ()

    @property
    def label(self) -> str:
        if not self.bindings:
            return self.name
        parts = ", ".join(f"{k}={E.format_number(v)}" for k, v in self.bindings)
        return f"{self.name}({parts})"

    def env(self) -> dict[str, float]:
        return dict(self.bindings)


@dataclass(frozen=True)
class TransitionRule:
    action_name: str
    assignments: tuple[tuple[str, E.Expr], ...]  # (state_var, expression), pre-step semantics


@dataclass(frozen=True)
class RewardMetric:
    name: str
    weight: float
    expression: E.Expr


@dataclass(frozen=True)
class GymSpec:
    name: str
    description: str
    state_vars: tuple[StateVar, ...]
    actions: tuple[ActionDef, ...]
    transition: tuple[TransitionRule, ...]
    reward_metrics: tuple[RewardMetric, ...]
    termination: E.Expr
    max_steps: int
    initial_state: tuple[tuple[str, float], ...]

    def state_var(self, name: str) -> StateVar | None:
        for var in self.state_vars:
            if var.name == name:
                return var
        return None

    def expanded_actions(self) -> list[ConcreteAction]:
        """All concrete actions, in declaration/parameter order.

        The position in this list is the action's index, used for
        deterministic tie-breaking everywhere.
        """
        out: list[ConcreteAction] = []
        for action in self.actions:
            if not action.params:
                out.append(ConcreteAction(action.name))
                continue
            names = [p.name for p in action.params]
            for combo in itertools.product(*(p.values for p in action.params)):
                out.append(ConcreteAction(action.name, tuple(zip(names, combo))))
        return out

    def rules_for(self, action_name: str) -> list[TransitionRule]:
        return [r for r in self.transition if r.action_name == action_name]


@dataclass(frozen=True)
class EnvState:
    """Immutable environment snapshot; step() produces a new one."""

    values: tuple[tuple[str, float], ...]
    step: int = 0
    done: bool = False

    def as_dict(self) -> dict[str, float]:
        return dict(self.values)

    def vector(self, spec: GymSpec) -> tuple[float, ...]:
        mapping = self.as_dict()
        return tuple(mapping[v.name] for v in spec.state_vars)


@dataclass(frozen=True)
class Finding:
    """One validation finding: machine-readable code plus offending path."""

    code: str
    path: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.findings

    def codes(self) -> list[str]:
        return [f.code for f in self.findings]
