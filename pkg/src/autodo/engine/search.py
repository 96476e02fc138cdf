"""Top-k search over the joint agent/hyperparameter space.

Candidates are independent work units executed on a bounded thread pool;
each one trains, evaluates, and reports through the event sink in real time.
The result is reproducible for a fixed (source, config, schemas, seed):
every candidate derives its own seed, so thread scheduling cannot change
scores, only event interleaving.
"""

from __future__ import annotations

import io
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from ..gymspec import GymSpec
from .agents import evaluate, train
from .candidates import EmptySearchSpace, PipelineCandidate, enumerate_candidates
from .config import AgentKind, EngineConfig, HyperparamSchema
from .dataset import TupleDataset
from .protocol import EvaluationProtocol, write_csv

EventSink = Callable[[str, dict], None]

_MASK64 = (1 << 64) - 1


class AllCandidatesFailed(Exception):
    pass


def derive_seed(seed: int, index: int) -> int:
    """Per-candidate seed; splitmix64 finalizer keeps it portable."""
    x = (seed ^ ((index + 1) * 0x9E3779B97F4A7C15)) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


@dataclass
class SearchResult:
    top: list[PipelineCandidate]
    candidates: list[PipelineCandidate]
    protocols: dict[str, list[EvaluationProtocol]] = field(default_factory=dict)

    def to_document(self) -> dict:
        return {
            "top_k": [c.candidate_id for c in self.top],
            "candidates": [c.to_document() for c in self.candidates],
            "protocol_refs": {
                cid: f"protocols/{cid}.csv" for cid in (c.candidate_id for c in self.top)
            },
        }

    def protocols_csv(self, candidate_id: str) -> str:
        buffer = io.StringIO()
        write_csv(self.protocols.get(candidate_id, []), buffer)
        return buffer.getvalue()


def search(
    source: GymSpec | TupleDataset,
    config: EngineConfig,
    schemas: dict[AgentKind, HyperparamSchema],
    event_sink: EventSink | None = None,
) -> SearchResult:
    candidates = enumerate_candidates(config, schemas)
    lock = threading.Lock()
    done_count = [0]

    def emit(kind: str, payload: dict) -> None:
        if event_sink is None:
            return
        with lock:
            event_sink(kind, payload)

    protocols: dict[str, list[EvaluationProtocol]] = {}

    def run_one(index: int, candidate: PipelineCandidate) -> None:
        emit(
            "candidate_started",
            {
                "candidate_id": candidate.candidate_id,
                "agent": candidate.agent.value,
                "hyperparams": candidate.hyperparams,
            },
        )
        seed = derive_seed(config.seed, index)
        try:
            result = train(
                source,
                candidate.agent,
                candidate.hyperparams,
                config.episodes_train,
                seed,
                state_bins=config.state_bins,
            )
            emit(
                "metric",
                {
                    "candidate_id": candidate.candidate_id,
                    "metric": "training_series",
                    "values": result.series,
                },
            )
            if isinstance(source, GymSpec):
                evals = evaluate(source, result.agent, config.episodes_eval, seed)
                scored = [p.total_reward for p in evals if not p.failed]
                if not scored:
                    raise RuntimeError("all evaluation episodes failed")
                candidate.rank_score = sum(scored) / len(scored)
                protocols[candidate.candidate_id] = evals
            else:
                # no environment to roll out in: rank by the mean greedy
                # value estimate over the dataset's states
                values = [max(row) for row in result.agent.q.values()]
                candidate.rank_score = sum(values) / len(values) if values else 0.0
            candidate.train_steps = result.agent.train_steps
        except Exception as exc:  # candidate-local failure; search continues
            candidate.failed = True
            candidate.error = f"{type(exc).__name__}: {exc}"
        with lock:
            done_count[0] += 1
            completed = done_count[0]
        emit(
            "candidate_finished",
            {
                "candidate_id": candidate.candidate_id,
                "status": "failed" if candidate.failed else "ok",
                "rank_score": candidate.rank_score,
                "train_steps": candidate.train_steps,
                "error": candidate.error,
            },
        )
        emit(
            "metric",
            {"metric": "progress", "completed": completed, "total": len(candidates)},
        )

    if config.optimization_workers == 1:
        for index, candidate in enumerate(candidates):
            run_one(index, candidate)
    else:
        with ThreadPoolExecutor(max_workers=config.optimization_workers) as pool:
            futures = [
                pool.submit(run_one, index, candidate)
                for index, candidate in enumerate(candidates)
            ]
            for future in futures:
                future.result()

    ok = [c for c in candidates if not c.failed]
    if not ok:
        raise AllCandidatesFailed(f"all {len(candidates)} candidates failed")
    ok.sort(key=lambda c: (-c.rank_score, c.train_steps, c.candidate_id))
    failed = [c for c in candidates if c.failed]
    top = ok[: config.top_k]
    return SearchResult(
        top=top,
        candidates=ok + failed,
        protocols={cid: p for cid, p in protocols.items()},
    )
