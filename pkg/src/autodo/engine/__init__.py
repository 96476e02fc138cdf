"""Desk-scale AutoDO core: tabular agents and joint pipeline search."""

from .agents import (
    IncompatibleDataSource,
    TrainedAgent,
    TrainResult,
    argmax_lowest,
    evaluate,
    train,
)
from .candidates import EmptySearchSpace, PipelineCandidate, enumerate_candidates
from .config import (
    AgentKind,
    Constraint,
    EngineConfig,
    HyperparamSchema,
    InvalidConfig,
    ParamSpec,
    config_from_document,
    config_to_document,
    default_schemas,
    validate_config,
)
from .dataset import TupleDataset, TupleRow
from .dataset import read_csv as read_tuples
from .dataset import write_csv as write_tuples
from .discretize import NonDiscretizableState, StateDiscretizer
from .protocol import (
    EvaluationProtocol,
    Labeler,
    ProtocolStep,
    from_rows,
    labeled_protocol,
    state_key,
)
from .protocol import read_csv as read_protocols
from .protocol import write_csv as write_protocols
from .search import AllCandidatesFailed, SearchResult, derive_seed, search

__all__ = [
    "AgentKind",
    "AllCandidatesFailed",
    "Constraint",
    "EmptySearchSpace",
    "EngineConfig",
    "EvaluationProtocol",
    "HyperparamSchema",
    "IncompatibleDataSource",
    "InvalidConfig",
    "Labeler",
    "NonDiscretizableState",
    "ParamSpec",
    "PipelineCandidate",
    "ProtocolStep",
    "SearchResult",
    "StateDiscretizer",
    "TrainResult",
    "TrainedAgent",
    "TupleDataset",
    "TupleRow",
    "argmax_lowest",
    "config_from_document",
    "config_to_document",
    "default_schemas",
    "derive_seed",
    "enumerate_candidates",
    "evaluate",
    "from_rows",
    "labeled_protocol",
    "read_protocols",
    "read_tuples",
    "search",
    "state_key",
    "train",
    "validate_config",
    "write_protocols",
    "write_tuples",
]
