"""End-to-end splicing: retrieve donors, complete the draft from each donor,
then rank and filter the solutions."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Optional

from ..codelet import Donor
from ..errors import EmptyIndex
from ..interp.vfs import EMPTY_FS, VirtualFS
from ..lang import ast as A
from ..lang.draft import Draft
from ..search.index import CorpusIndex, QueryWeights, knn_query
from .config import SpliceConfig, Stats
from .fill import DonorCodelets, fill, hole_specs
from .merge import Solution, Validator, merge

PRECISION_EVAL_BUDGET = 10 ** 9


# ---------------------------------------------------------------------------
# Post-filters
# ---------------------------------------------------------------------------


def has_dead_return(program: A.Program) -> bool:
    """A return followed by another statement in the same block."""
    for n in A.walk(program.body):
        if type(n) is A.Block:
            for s in n.stmts[:-1]:
                if type(s) is A.Return:
                    return True
    return False


def no_dead_return(sol: Solution) -> bool:
    return not has_dead_return(sol.program)


DEFAULT_FILTERS: tuple = (no_dead_return,)


def post_filter(sols: Iterable[Solution],
                filters: tuple[Callable[[Solution], bool], ...] = DEFAULT_FILTERS) -> list:
    """Solutions accepted by every filter layer, order preserved."""
    return [s for s in sols if all(f(s) for f in filters)]


# ---------------------------------------------------------------------------
# Per-donor completion
# ---------------------------------------------------------------------------


@dataclass
class DonorResult:
    source_id: int
    rank: int
    solutions: list = field(default_factory=list)
    stats: Stats = field(default_factory=Stats)
    timed_out: bool = False
    exhausted_budget: bool = False


def complete_donor(draft: Draft, donor_program: A.Program, source_id: int, rank: int,
                   cfg: SpliceConfig, fs: VirtualFS = EMPTY_FS,
                   deadline: Optional[float] = None) -> DonorResult:
    """Run fill and merge over one donor."""
    result = DonorResult(source_id, rank)
    stats = result.stats

    def should_stop() -> bool:
        if deadline is not None and time.monotonic() > deadline:
            result.timed_out = True
            return True
        if cfg.eval_budget is not None and stats.candidates_evaluated >= cfg.eval_budget:
            result.exhausted_budget = True
            return True
        return False

    specs = hole_specs(draft)
    codelets = None
    if specs:
        donor = Donor.prepare(donor_program, source_id, draft.registry)
        codelets = DonorCodelets.extract(donor, cfg.max_window)
    validate = Validator(draft, fs, cfg.test_limits)
    seen: set = set()
    for cand in fill(draft, donor_program, cfg, codelets, specs):
        if should_stop():
            break
        stats.candidates += 1
        sol = merge(cand, cfg, validate, stats, should_stop)
        if result.timed_out or result.exhausted_budget:
            break
        if sol is None:
            continue
        text = sol.text
        if text in seen or not post_filter([sol]):
            continue
        seen.add(text)
        if len(result.solutions) < cfg.max_solutions:
            sol.donor = source_id
            sol.donor_rank = rank
            sol.discovery_order = len(seen) - 1
            result.solutions.append(sol)
        if len(result.solutions) >= cfg.max_solutions and not cfg.exhaustive:
            break
    return result


# ---------------------------------------------------------------------------
# splice
# ---------------------------------------------------------------------------


@dataclass
class SpliceResult:
    solutions: list
    stats: Stats
    timed_out: bool
    neighbors: list  # [(source id, score)] in rank order
    wall_time: float = 0.0
    donors: list = field(default_factory=list)  # DonorResult per neighbor

    def __iter__(self):
        return iter(self.solutions)

    def __len__(self) -> int:
        return len(self.solutions)

    def __getitem__(self, i):
        return self.solutions[i]

    def as_dict(self, index: Optional[CorpusIndex] = None) -> dict:
        """Schedule- and timing-independent record (wall time left out)."""
        neighbors = []
        for sid, score in self.neighbors:
            item = {"sourceId": sid, "score": round(score, 12)}
            if index is not None:
                item["path"] = index.entry(sid).path
                item["function"] = index.entry(sid).program.name
            neighbors.append(item)
        return {"solutions": [s.as_dict() for s in self.solutions],
                "stats": self.stats.as_dict(), "timedOut": self.timed_out,
                "neighbors": neighbors}


def _run_donors(draft: Draft, index: CorpusIndex, neighbors, cfg: SpliceConfig,
                fs: VirtualFS, deadline: Optional[float]) -> list[DonorResult]:
    def task(item):
        rank, (sid, _) = item
        return complete_donor(draft, index.entry(sid).program, sid, rank, cfg, fs, deadline)

    items = list(enumerate(neighbors))
    workers = min(cfg.worker_count(), max(1, len(items)))
    if workers == 1:
        return [task(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, items))


def aggregate(results: list[DonorResult], max_solutions: int) -> list[Solution]:
    """Order by (donor rank, discovery order), drop repeats, filter, truncate."""
    sols = sorted((s for r in results for s in r.solutions),
                  key=lambda s: (s.donor_rank, s.discovery_order))
    seen: set = set()
    unique = []
    for s in sols:
        if s.text not in seen:
            seen.add(s.text)
            unique.append(s)
    return post_filter(unique)[:max_solutions]


def splice(draft: Draft, index: CorpusIndex, cfg: SpliceConfig = SpliceConfig(),
           fs: VirtualFS = EMPTY_FS) -> SpliceResult:
    """Complete ``draft`` with codelets from its ``cfg.k`` nearest corpus functions."""
    start = time.monotonic()
    if not index.entries:
        raise EmptyIndex("the corpus index is empty")
    deadline = None if cfg.search_time_limit is None else start + cfg.search_time_limit
    neighbors = knn_query(index, draft, cfg.k, cfg.weights)
    results = _run_donors(draft, index, neighbors, cfg, fs, deadline)
    stats = Stats()
    for r in results:
        stats.add(r.stats)
    sols = aggregate(results, cfg.max_solutions)
    timed_out = any(r.timed_out for r in results) and len(sols) < cfg.max_solutions
    return SpliceResult(sols, stats, timed_out, neighbors, time.monotonic() - start, results)


# ---------------------------------------------------------------------------
# Precision and ablations
# ---------------------------------------------------------------------------


@dataclass
class Precision:
    high_quality: int
    k: int
    donors: list  # [(source id, has solution)]

    @property
    def value(self) -> float:
        return self.high_quality / self.k


def measure_precision(draft: Draft, index: CorpusIndex, k: int = 5,
                      weights: QueryWeights = QueryWeights(), fs: VirtualFS = EMPTY_FS,
                      cfg: Optional[SpliceConfig] = None) -> Precision:
    """Fraction of the top-``k`` donors that complete the draft on their own,
    searched without a time limit."""
    base = cfg or SpliceConfig()
    cfg = replace(base, k=k, weights=weights, max_solutions=1, search_time_limit=None,
                  eval_budget=PRECISION_EVAL_BUDGET, exhaustive=False)
    if not index.entries:
        raise EmptyIndex("the corpus index is empty")
    neighbors = knn_query(index, draft, k, weights)
    results = _run_donors(draft, index, neighbors, cfg, fs, None)
    donors = [(r.source_id, bool(r.solutions)) for r in results]
    return Precision(sum(ok for _, ok in donors), k, donors)


def ablation_run(draft: Draft, index: CorpusIndex, cfg: SpliceConfig = SpliceConfig(),
                 fs: VirtualFS = EMPTY_FS, *, type_matching: Optional[bool] = None,
                 role_matching: Optional[bool] = None):
    """``splice`` with heuristics switched off, searching every donor fully so
    that the counters cover the whole space. Returns ``(solutions, stats)``
    where stats carries ``wallTime`` in seconds."""
    changes = {"exhaustive": True}
    if type_matching is not None:
        changes["type_matching"] = type_matching
    if role_matching is not None:
        changes["role_matching"] = role_matching
    result = splice(draft, index, replace(cfg, **changes), fs)
    stats = result.stats.as_dict()
    stats["wallTime"] = result.wall_time
    return result.solutions, stats
