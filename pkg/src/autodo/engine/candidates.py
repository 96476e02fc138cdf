"""Joint agent/hyperparameter candidate enumeration.

Two strategies:

* ``random`` — agent kind uniform over the enabled set, discrete parameters
  uniform over allowed values, continuous uniform in range; all under seed.
* ``discrepancy_grid`` — the all-defaults candidate first, then candidates
  ordered by how many parameters deviate from their defaults (one at a time,
  then pairs, ...). Continuous/integer ranges contribute a lo/mid/hi grid.
  If the finite grid is exhausted before the budget, the stream restarts
  (duplicate settings receive fresh candidate ids).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .config import (
    CONTINUOUS,
    DISCRETE,
    INTEGER,
    AgentKind,
    EngineConfig,
    HyperparamSchema,
    ParamSpec,
    effective_param,
    validate_config,
)


class EmptySearchSpace(Exception):
    pass


@dataclass
class PipelineCandidate:
    candidate_id: str
    agent: AgentKind
    hyperparams: dict[str, float | int]
    rank_score: float | None = None
    train_steps: int = 0
    failed: bool = False
    error: str | None = None

    def to_document(self) -> dict:
        return {
            "candidate_id": self.candidate_id,
            "agent": self.agent.value,
            "hyperparams": self.hyperparams,
            "rank_score": self.rank_score,
            "train_steps": self.train_steps,
            "failed": self.failed,
            "error": self.error,
        }


def enumerate_candidates(
    config: EngineConfig, schemas: dict[AgentKind, HyperparamSchema]
) -> list[PipelineCandidate]:
    """Exactly candidate_budget unevaluated candidates, deterministic under seed."""
    validate_config(config, schemas)
    effective: dict[AgentKind, list[ParamSpec]] = {}
    for kind in config.enabled_agents:
        constraints = config.constraints.get(kind, {})
        effective[kind] = [
            effective_param(p, constraints.get(p.name)) for p in schemas[kind].params
        ]
    if not effective:
        raise EmptySearchSpace("no enabled agents")

    if config.search_strategy == "random":
        settings = _random_stream(config, effective)
    else:
        settings = _discrepancy_stream(config, effective)

    out = []
    for i, (kind, hyperparams) in enumerate(itertools.islice(settings, config.candidate_budget)):
        out.append(PipelineCandidate(f"c{i + 1:04d}", kind, hyperparams))
    if len(out) < config.candidate_budget:
        raise EmptySearchSpace("candidate stream ended prematurely")
    return out


def _random_stream(config: EngineConfig, effective):
    rng = random.Random(config.seed)
    kinds = list(config.enabled_agents)
    while True:
        kind = kinds[rng.randrange(len(kinds))]
        hyperparams: dict[str, float | int] = {}
        for param in effective[kind]:
            if param.type == DISCRETE:
                hyperparams[param.name] = param.values[rng.randrange(len(param.values))]
            elif param.type == INTEGER:
                lo, hi = param.range
                hyperparams[param.name] = rng.randint(int(lo), int(hi))
            else:
                lo, hi = param.range
                hyperparams[param.name] = rng.uniform(lo, hi)
        yield kind, hyperparams


def _grid_values(param: ParamSpec) -> list[float | int]:
    """Non-default probe values for one parameter."""
    if param.type == DISCRETE:
        return [v for v in param.values if v != param.default]
    lo, hi = param.range
    if param.type == INTEGER:
        probes = [int(lo), int(round((lo + hi) / 2)), int(hi)]
    else:
        probes = [lo, (lo + hi) / 2, hi]
    out = []
    for v in probes:
        if v != param.default and v not in out:
            out.append(v)
    return out


def _discrepancy_stream(config: EngineConfig, effective):
    kinds = list(config.enabled_agents)
    grids = {kind: [(_p, _grid_values(_p)) for _p in effective[kind]] for kind in kinds}
    max_level = max((len(effective[k]) for k in kinds), default=0)

    def level_settings(level: int):
        for kind in kinds:
            params = grids[kind]
            defaults = {p.name: p.default for p, _ in params}
            if level == 0:
                yield kind, dict(defaults)
                continue
            if level > len(params):
                continue
            for combo in itertools.combinations(range(len(params)), level):
                if any(not params[i][1] for i in combo):
                    continue
                for assignment in itertools.product(*(params[i][1] for i in combo)):
                    hyperparams = dict(defaults)
                    for i, value in zip(combo, assignment):
                        hyperparams[params[i][0].name] = value
                    yield kind, hyperparams

    while True:
        for level in range(max_level + 1):
            yield from level_settings(level)


def deviation_count(
    candidate: PipelineCandidate, schemas: dict[AgentKind, HyperparamSchema]
) -> int:
    """Number of hyperparameters differing from the schema defaults."""
    defaults = schemas[candidate.agent].defaults()
    return sum(1 for name, value in candidate.hyperparams.items() if value != defaults[name])
