"""Experiment reports and their canonical serialization.

A report is a pure function of (parameters, seed): the canonical JSON bytes
are reproduced bit-for-bit by reruns regardless of worker count.  Wall-clock
time and other execution details are therefore kept outside the canonical
payload.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

__all__ = ["ExperimentReport"]


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


@dataclass
class ExperimentReport:
    """Statistics, targets and pass flags of one seeded experiment."""

    op: str
    parameters: dict[str, Any]
    seed: int
    reps: int
    statistics: dict[str, Any]
    targets: dict[str, Any]
    passes: dict[str, bool]
    notes: list[str] = field(default_factory=list)
    wall_clock_ms: float = 0.0  # execution detail; not part of the canonical payload
    raw_rows: list[tuple] = field(default_factory=list, repr=False)

    @property
    def all_pass(self) -> bool:
        return all(self.passes.values())

    def canonical_dict(self) -> dict[str, Any]:
        return _jsonable(
            {
                "op": self.op,
                "parameters": self.parameters,
                "seed": self.seed,
                "reps": self.reps,
                "statistics": self.statistics,
                "targets": self.targets,
                "passes": self.passes,
                "notes": list(self.notes),
            }
        )

    def canonical_json(self) -> str:
        return json.dumps(self.canonical_dict(), sort_keys=True, indent=2)

    def canonical_bytes(self) -> bytes:
        return self.canonical_json().encode("utf-8")

    def iter_raw(self) -> Iterable[tuple]:
        return iter(self.raw_rows)
