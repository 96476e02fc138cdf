"""Agent kinds, hyperparameter schemas, and engine configuration."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class AgentKind(str, Enum):
    Q_LEARNING = "q_learning"
    SARSA = "sarsa"
    FITTED_Q = "fitted_q"
    DYNA_Q = "dyna_q"
    RANDOM_POLICY = "random_policy"

    @property
    def offline(self) -> bool:
        """Offline kinds train from a TupleDataset; online kinds need a gym."""
        return self is AgentKind.FITTED_Q


DISCRETE = "discrete"
CONTINUOUS = "continuous"
INTEGER = "integer"


@dataclass(frozen=True)
class ParamSpec:
    name: str
    type: str  # DISCRETE | CONTINUOUS | INTEGER
    default: float | int
    values: tuple | None = None  # discrete
    range: tuple[float, float] | None = None  # continuous/integer

    def __post_init__(self):
        if self.type == DISCRETE:
            if not self.values:
                raise ValueError(f"parameter '{self.name}': discrete value list must be nonempty")
            if self.default not in self.values:
                raise ValueError(f"parameter '{self.name}': default not among values")
        else:
            if self.range is None:
                raise ValueError(f"parameter '{self.name}': range required")
            lo, hi = self.range
            if not lo <= self.default <= hi:
                raise ValueError(f"parameter '{self.name}': default outside range")


@dataclass(frozen=True)
class HyperparamSchema:
    params: tuple[ParamSpec, ...] = ()

    def get(self, name: str) -> ParamSpec | None:
        for param in self.params:
            if param.name == name:
                return param
        return None

    def defaults(self) -> dict[str, float | int]:
        return {p.name: p.default for p in self.params}


def default_schemas() -> dict[AgentKind, HyperparamSchema]:
    """Built-in search space: gamma/alpha/epsilon on every online agent."""
    gamma = ParamSpec("gamma", CONTINUOUS, 0.95, range=(0.5, 0.999))
    alpha = ParamSpec("alpha", CONTINUOUS, 0.1, range=(0.01, 1.0))
    epsilon = ParamSpec("epsilon", CONTINUOUS, 0.1, range=(0.0, 1.0))
    return {
        AgentKind.Q_LEARNING: HyperparamSchema((gamma, alpha, epsilon)),
        AgentKind.SARSA: HyperparamSchema((gamma, alpha, epsilon)),
        AgentKind.DYNA_Q: HyperparamSchema(
            (gamma, alpha, epsilon, ParamSpec("planning_steps", INTEGER, 5, range=(0, 50)))
        ),
        AgentKind.FITTED_Q: HyperparamSchema(
            (gamma, ParamSpec("iterations", INTEGER, 500, range=(10, 2000)))
        ),
        AgentKind.RANDOM_POLICY: HyperparamSchema(()),
    }


@dataclass(frozen=True)
class Constraint:
    """Subset of a parameter's schema values or range."""

    values: tuple | None = None
    range: tuple[float, float] | None = None


@dataclass(frozen=True)
class EngineConfig:
    enabled_agents: tuple[AgentKind, ...]
    candidate_budget: int
    episodes_train: int
    episodes_eval: int
    top_k: int
    seed: int
    search_strategy: str = "random"  # "random" | "discrepancy_grid"
    optimization_workers: int = 1
    constraints: dict[AgentKind, dict[str, Constraint]] = field(default_factory=dict)
    state_bins: int = 10  # uniform bins per continuous state var


class InvalidConfig(ValueError):
    pass


def validate_config(config: EngineConfig, schemas: dict[AgentKind, HyperparamSchema]) -> None:
    if not config.enabled_agents:
        raise InvalidConfig("enabled_agents must be nonempty")
    if config.candidate_budget < 1:
        raise InvalidConfig("candidate_budget must be positive")
    if config.top_k < 1 or config.top_k > config.candidate_budget:
        raise InvalidConfig("top_k must satisfy 1 <= top_k <= candidate_budget")
    if config.episodes_train < 1 or config.episodes_eval < 1:
        raise InvalidConfig("episode counts must be positive")
    if config.optimization_workers < 1:
        raise InvalidConfig("optimization_workers must be positive")
    if config.search_strategy not in ("random", "discrepancy_grid"):
        raise InvalidConfig(f"unknown search strategy {config.search_strategy!r}")
    for kind in config.enabled_agents:
        if kind not in schemas:
            raise InvalidConfig(f"no hyperparameter schema for agent {kind.value!r}")
    for kind, params in config.constraints.items():
        schema = schemas.get(kind)
        if schema is None:
            raise InvalidConfig(f"constraint for unknown agent {kind!r}")
        for name, constraint in params.items():
            spec = schema.get(name)
            if spec is None:
                raise InvalidConfig(f"constraint for unknown parameter {kind.value}.{name}")
            if spec.type == DISCRETE:
                if not constraint.values:
                    raise InvalidConfig(f"{kind.value}.{name}: constrained value list is empty")
                extra = set(constraint.values) - set(spec.values)
                if extra:
                    raise InvalidConfig(f"{kind.value}.{name}: values {extra} not in schema")
            else:
                if constraint.range is None:
                    raise InvalidConfig(f"{kind.value}.{name}: range constraint required")
                lo, hi = constraint.range
                if lo > hi or lo < spec.range[0] or hi > spec.range[1]:
                    raise InvalidConfig(f"{kind.value}.{name}: range not a subset of schema")


def effective_param(spec: ParamSpec, constraint: Constraint | None) -> ParamSpec:
    """Apply a config constraint; the default is clamped into the subset."""
    if constraint is None:
        return spec
    if spec.type == DISCRETE:
        values = constraint.values or spec.values
        default = spec.default if spec.default in values else values[0]
        return ParamSpec(spec.name, spec.type, default, values=tuple(values))
    lo, hi = constraint.range or spec.range
    default = min(max(spec.default, lo), hi)
    if spec.type == INTEGER:
        default = int(round(default))
    return ParamSpec(spec.name, spec.type, default, range=(lo, hi))


# --- external document form --------------------------------------------


def config_to_document(config: EngineConfig) -> dict:
    constraints = {
        kind.value: {
            name: ({"values": list(c.values)} if c.values is not None else {"range": list(c.range)})
            for name, c in params.items()
        }
        for kind, params in config.constraints.items()
    }
    return {
        "enabled_agents": [k.value for k in config.enabled_agents],
        "candidate_budget": config.candidate_budget,
        "episodes_train": config.episodes_train,
        "episodes_eval": config.episodes_eval,
        "top_k": config.top_k,
        "seed": config.seed,
        "search_strategy": config.search_strategy,
        "optimization_workers": config.optimization_workers,
        "constraints": constraints,
        "state_bins": config.state_bins,
    }


def config_from_document(doc: dict) -> EngineConfig:
    constraints: dict[AgentKind, dict[str, Constraint]] = {}
    for kind_name, params in (doc.get("constraints") or {}).items():
        kind = AgentKind(kind_name)
        constraints[kind] = {}
        for name, c in params.items():
            if "values" in c:
                constraints[kind][name] = Constraint(values=tuple(c["values"]))
            else:
                constraints[kind][name] = Constraint(range=tuple(c["range"]))
    return EngineConfig(
        enabled_agents=tuple(AgentKind(k) for k in doc["enabled_agents"]),
        candidate_budget=int(doc["candidate_budget"]),
        episodes_train=int(doc["episodes_train"]),
        episodes_eval=int(doc["episodes_eval"]),
        top_k=int(doc["top_k"]),
        seed=int(doc["seed"]),
        search_strategy=doc.get("search_strategy", "random"),
        optimization_workers=int(doc.get("optimization_workers", 1)),
        constraints=constraints,
        state_bins=int(doc.get("state_bins", 10)),
    )
