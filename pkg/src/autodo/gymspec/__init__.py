"""Declarative gym specifications: model, DSL, interpreter, and codegen."""

from .codegen import backends, generate_source, register_backend
from .errors import (
    DivisionByZero,
    EpisodeFinished,
    ExpressionTypeError,
    GymSpecError,
    InvalidSpec,
    ParseError,
    SchemaError,
    UnknownAction,
    UnknownBackend,
)
from .expr import evaluate, free_names, infer_type, parse_expression, unparse
from .interpreter import Simulator, clamp_value, reset, round_half_away, step
from .model import (
    ActionDef,
    ActionParam,
    ConcreteAction,
    EnvState,
    Finding,
    GymSpec,
    RewardMetric,
    StateVar,
    TransitionRule,
    ValidationReport,
)
from .parser import parse_document, parse_spec, serialize, to_document
from .validate import validate

__all__ = [
    "ActionDef",
    "ActionParam",
    "ConcreteAction",
    "DivisionByZero",
    "EnvState",
    "EpisodeFinished",
    "ExpressionTypeError",
    "Finding",
    "GymSpec",
    "GymSpecError",
    "InvalidSpec",
    "ParseError",
    "RewardMetric",
    "SchemaError",
    "Simulator",
    "StateVar",
    "TransitionRule",
    "UnknownAction",
    "UnknownBackend",
    "ValidationReport",
    "backends",
    "clamp_value",
    "evaluate",
    "free_names",
    "generate_source",
    "infer_type",
    "parse_document",
    "parse_expression",
    "parse_spec",
    "register_backend",
    "reset",
    "round_half_away",
    "serialize",
    "step",
    "to_document",
    "unparse",
    "validate",
]
