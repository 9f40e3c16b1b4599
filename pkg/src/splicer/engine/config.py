"""Search configuration and counters."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional

from ..interp.evaluator import Limits
from ..search.index import QueryWeights


@dataclass(frozen=True)
class SpliceConfig:
    k: int = 5
    weights: QueryWeights = field(default_factory=QueryWeights)
    max_solutions: int = 3
    search_time_limit: Optional[float] = 300.0  # seconds; None disables the limit
    test_limits: Limits = field(default_factory=Limits)
    type_matching: bool = True
    role_matching: bool = True
    constant_adaptation: bool = False
    constant_budget: int = 32
    max_window: int = 8
    workers: Optional[int] = None
    # safety cap on validated candidates per donor; None means unbounded
    eval_budget: Optional[int] = None
    # keep searching each donor after max_solutions (exact whole-space counts)
    exhaustive: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.max_solutions < 1:
            raise ValueError("max_solutions must be at least 1")
        if self.search_time_limit is not None and self.search_time_limit <= 0:
            raise ValueError("search_time_limit must be positive")
        if self.max_window < 1:
            raise ValueError("max_window must be at least 1")

    def worker_count(self) -> int:
        return self.workers if self.workers else (os.cpu_count() or 1)


@dataclass
class Stats:
    candidates: int = 0  # complete hole assignments produced by fill
    candidates_evaluated: int = 0  # fully renamed programs checked
    tests_run: int = 0  # requirement executions

    def add(self, other: "Stats") -> None:
        self.candidates += other.candidates
        self.candidates_evaluated += other.candidates_evaluated
        self.tests_run += other.tests_run

    def as_dict(self) -> dict:
        return {"candidates": self.candidates,
                "candidatesEvaluated": self.candidates_evaluated,
                "testsRun": self.tests_run}
