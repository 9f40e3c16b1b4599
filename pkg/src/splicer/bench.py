"""Bundled benchmark suite: drafts, virtual file systems and test limits."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Optional

from .engine import SpliceConfig, ablation_run, splice
from .interp.evaluator import Limits
from .interp.vfs import EMPTY_FS, VirtualFS
from .lang.draft import Draft, load_draft
from .search.index import CorpusIndex, build_index


def data_dir() -> Path:
    return Path(str(resources.files("splicer") / "data"))


def corpus_dir() -> Path:
    return data_dir() / "corpus"


def benchmarks_dir() -> Path:
    return data_dir() / "benchmarks"


@dataclass(frozen=True)
class Benchmark:
    name: str
    draft_path: Path
    target: str  # name of the planted donor function
    fs_path: Optional[Path] = None
    limits: Limits = Limits()

    def draft(self, registry=None) -> Draft:
        return load_draft(self.draft_path, registry)

    def fs(self) -> VirtualFS:
        return VirtualFS.from_manifest(self.fs_path) if self.fs_path else EMPTY_FS

    def config(self, **changes) -> SpliceConfig:
        changes.setdefault("test_limits", self.limits)
        return SpliceConfig(**changes)


def load_suite(path: str | Path | None = None) -> list[Benchmark]:
    path = Path(path) if path is not None else benchmarks_dir() / "suite.json"
    data = json.loads(path.read_text())
    base = path.parent
    out = []
    for b in data["benchmarks"]:
        lim = b.get("limits", {})
        out.append(Benchmark(b["name"], base / b["draft"], b["target"],
                             base / b["fs"] if b.get("fs") else None,
                             Limits(lim.get("step_fuel", Limits.step_fuel),
                                    lim.get("wall_clock", Limits.wall_clock))))
    return out


def benchmark(name: str) -> Benchmark:
    for b in load_suite():
        if b.name == name:
            return b
    raise KeyError(name)


def bundled_index(registry=None) -> CorpusIndex:
    return build_index(corpus_dir(), registry)


def run_benchmark(b: Benchmark, index: CorpusIndex, cfg: Optional[SpliceConfig] = None):
    cfg = cfg if cfg is not None else b.config()
    return splice(b.draft(), index, cfg, b.fs())


def ablation_table(b: Benchmark, index: CorpusIndex, cfg: Optional[SpliceConfig] = None) -> dict:
    """Counters of exhaustive searches with each heuristic switched off."""
    cfg = cfg if cfg is not None else b.config()
    draft, fs = b.draft(), b.fs()
    rows = {}
    for label, changes in (("with", {}), ("noTypes", {"type_matching": False}),
                           ("noRoles", {"role_matching": False})):
        sols, stats = ablation_run(draft, index, replace(cfg, **changes), fs)
        rows[label] = {"solutions": [s.text for s in sols], **stats}
    return rows
