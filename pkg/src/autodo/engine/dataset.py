"""Offline tuple datasets: rows of (state, action id, reward, next state)."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class TupleRow:
    s: tuple[float, ...]
    a: int
    r: float
    sp: tuple[float, ...]


@dataclass(frozen=True)
class TupleDataset:
    rows: tuple[TupleRow, ...]

    def __post_init__(self):
        if not self.rows:
            raise ValueError("tuple dataset must be nonempty")
        arity = len(self.rows[0].s)
        for i, row in enumerate(self.rows):
            if len(row.s) != arity or len(row.sp) != arity:
                raise ValueError(f"row {i}: state arity differs from first row ({arity})")
            values = (*row.s, row.r, *row.sp)
            if any(not math.isfinite(v) for v in values):
                raise ValueError(f"row {i}: non-finite value")

    @property
    def arity(self) -> int:
        return len(self.rows[0].s)

    @property
    def n_actions(self) -> int:
        return max(row.a for row in self.rows) + 1


def write_csv(dataset: TupleDataset, target: str | Path) -> None:
    n = dataset.arity
    header = [f"s_{i}" for i in range(n)] + ["a", "r"] + [f"sp_{i}" for i in range(n)]
    with open(target, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in dataset.rows:
            writer.writerow([*row.s, row.a, row.r, *row.sp])


def read_csv(source: str | Path) -> TupleDataset:
    with open(source, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if not header:
            raise ValueError("empty tuple dataset file")
        names = [h.strip() for h in header]
        if "a" not in names or "r" not in names:
            raise ValueError("tuple dataset CSV requires 'a' and 'r' columns")
        n = names.index("a")
        expected = [f"s_{i}" for i in range(n)] + ["a", "r"] + [f"sp_{i}" for i in range(n)]
        if names != expected:
            raise ValueError(f"tuple dataset CSV header must be {expected}")
        rows = []
        for record in reader:
            if not record:
                continue
            rows.append(
                TupleRow(
                    s=tuple(float(v) for v in record[:n]),
                    a=int(record[n]),
                    r=float(record[n + 1]),
                    sp=tuple(float(v) for v in record[n + 2 : 2 * n + 2]),
                )
            )
    return TupleDataset(tuple(rows))
