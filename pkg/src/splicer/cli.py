"""Command-line interface: index, search, splice, precision and bench."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from .errors import SpliceError
from .interp.evaluator import Limits
from .interp.vfs import EMPTY_FS, VirtualFS
from .lang.draft import load_draft
from .search.index import QueryWeights, build_index, knn_query, load_index, save_index

EXIT_OK = 0
EXIT_NO_SOLUTION = 1
EXIT_USAGE = 2
EXIT_TIMEOUT = 3


class _Usage(Exception):
    """Bad input: reported on stderr with exit status 2."""


def _positive_float(text: str) -> float:
    v = float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _add_query_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=_positive_int, default=5, help="donors to retrieve (default 5)")
    p.add_argument("--w-nl", type=float, default=None,
                   help="weight of natural-language similarity (default 0.8)")
    p.add_argument("--w-names", type=float, default=None,
                   help="weight of name similarity (default 0.2)")
    p.add_argument("--corpus-root", default=None,
                   help="directory holding the indexed sources (default: recorded root)")


def _add_splice_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-solutions", type=_positive_int, default=3)
    p.add_argument("--time-limit", type=_positive_float, default=300.0,
                   help="search time limit in seconds (default 300)")
    p.add_argument("--no-time-limit", action="store_true", help="search without a time limit")
    p.add_argument("--fuel", type=_positive_int, default=Limits.step_fuel,
                   help="interpreter steps per test execution")
    p.add_argument("--test-time-limit", type=_positive_float, default=Limits.wall_clock,
                   help="CPU seconds per test execution")
    p.add_argument("--no-types", action="store_true", help="disable type matching")
    p.add_argument("--no-roles", action="store_true", help="disable role matching")
    p.add_argument("--adapt-constants", action="store_true",
                   help="also try codelets with integer literals adapted to the draft")
    p.add_argument("--constant-budget", type=_positive_int, default=32,
                   help="variants per codelet when adapting constants")
    p.add_argument("--max-window", type=_positive_int, default=8,
                   help="longest statement window taken from a donor")
    p.add_argument("--eval-budget", type=_positive_int, default=None,
                   help="cap on evaluated candidates per donor")
    p.add_argument("--exhaustive", action="store_true",
                   help="search every donor completely (exact counters)")
    p.add_argument("--workers", type=_positive_int, default=None,
                   help="parallel donor tasks (env SPLICE_WORKERS overrides)")
    p.add_argument("--fs-manifest", default=None,
                   help="JSON file with the virtual file system for tests")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="splicer",
                                     description="Complete draft programs from a code corpus.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="index a corpus directory")
    p.add_argument("corpus_dir")
    p.add_argument("out", help="index file to write")

    p = sub.add_parser("search", help="show the nearest corpus functions for a draft")
    p.add_argument("index")
    p.add_argument("draft")
    _add_query_flags(p)

    p = sub.add_parser("splice", help="complete a draft")
    p.add_argument("index")
    p.add_argument("draft")
    _add_query_flags(p)
    _add_splice_flags(p)
    p.add_argument("--json", action="store_true", help="emit a JSON record")

    p = sub.add_parser("precision", help="fraction of retrieved donors that complete the draft")
    p.add_argument("index")
    p.add_argument("draft")
    _add_query_flags(p)
    _add_splice_flags(p)

    p = sub.add_parser("bench", help="run the bundled benchmark suite")
    p.add_argument("names", nargs="*", help="benchmarks to run (default: all)")
    p.add_argument("--ablations", action="store_true",
                   help="also report counters with each heuristic disabled")
    p.add_argument("--workers", type=_positive_int, default=None)
    p.add_argument("--json", action="store_true")
    return parser


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _weights(args) -> QueryWeights:
    w_nl, w_names = args.w_nl, args.w_names
    if w_nl is None and w_names is None:
        return QueryWeights()
    if w_nl is None:
        w_nl = 1.0 - w_names
    if w_names is None:
        w_names = 1.0 - w_nl
    try:
        return QueryWeights(w_nl, w_names)
    except ValueError as exc:
        raise _Usage(str(exc)) from None


def _workers(args):
    env = os.environ.get("SPLICE_WORKERS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise _Usage(f"SPLICE_WORKERS must be an integer, got {env!r}") from None
        if n < 1:
            raise _Usage("SPLICE_WORKERS must be at least 1")
        return n
    return args.workers


def _config(args):
    from .engine import SpliceConfig

    return SpliceConfig(
        k=args.k, weights=_weights(args), max_solutions=args.max_solutions,
        search_time_limit=None if args.no_time_limit else args.time_limit,
        test_limits=Limits(args.fuel, args.test_time_limit),
        type_matching=not args.no_types, role_matching=not args.no_roles,
        constant_adaptation=args.adapt_constants, constant_budget=args.constant_budget,
        max_window=args.max_window, workers=_workers(args), eval_budget=args.eval_budget,
        exhaustive=args.exhaustive)


def _load(args):
    try:
        index = load_index(args.index, args.corpus_root)
    except (OSError, ValueError, KeyError) as exc:
        raise _Usage(f"cannot load index {args.index}: {exc}") from None
    draft = load_draft(args.draft)
    return index, draft


def _fs(args) -> VirtualFS:
    if not args.fs_manifest:
        return EMPTY_FS
    try:
        return VirtualFS.from_manifest(args.fs_manifest)
    except (OSError, ValueError, TypeError) as exc:
        raise _Usage(f"cannot load file system manifest {args.fs_manifest}: {exc}") from None


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_index(args, out=sys.stdout, err=sys.stderr) -> int:
    corpus = Path(args.corpus_dir)
    if not corpus.is_dir():
        raise _Usage(f"not a readable directory: {corpus}")
    skipped: list = []
    index = build_index(corpus, skipped=skipped)
    save_index(index, args.out)
    for s in skipped:
        print(f"skipped {s}", file=err)
    print(f"indexed {len(index)} functions", file=out)
    return EXIT_OK


def cmd_search(args, out=sys.stdout, err=sys.stderr) -> int:
    index, draft = _load(args)
    for rank, (sid, score) in enumerate(knn_query(index, draft, args.k, _weights(args)), 1):
        e = index.entry(sid)
        print(f"{rank} {score:.4f} {sid} {e.path} {e.program.name}", file=out)
    return EXIT_OK


def _status(result) -> int:
    if result.timed_out:
        return EXIT_TIMEOUT
    return EXIT_OK if result.solutions else EXIT_NO_SOLUTION


def cmd_splice(args, out=sys.stdout, err=sys.stderr) -> int:
    from .engine import splice

    index, draft = _load(args)
    cfg = _config(args)
    result = splice(draft, index, cfg, _fs(args))
    if args.json:
        print(json.dumps(result.as_dict(index), indent=2), file=out)
    else:
        for n, sol in enumerate(result.solutions, 1):
            print(f"--- solution {n} (donor {sol.donor}) ---", file=out)
            print(sol.text, file=out)
        if not result.solutions:
            print("no solution found", file=err)
        if result.timed_out:
            print("search time limit reached", file=err)
    return _status(result)


def cmd_precision(args, out=sys.stdout, err=sys.stderr) -> int:
    from .engine import measure_precision

    index, draft = _load(args)
    cfg = _config(args)
    p = measure_precision(draft, index, args.k, cfg.weights, _fs(args), cfg)
    print(f"precision: {p.high_quality}/{p.k} = {p.value:.2f}", file=out)
    return EXIT_OK


def cmd_bench(args, out=sys.stdout, err=sys.stderr) -> int:
    from .bench import ablation_table, bundled_index, load_suite, run_benchmark

    suite = load_suite()
    names = {b.name for b in suite}
    unknown = [n for n in args.names if n not in names]
    if unknown:
        raise _Usage(f"unknown benchmarks: {', '.join(unknown)}")
    index = bundled_index()
    records = []
    status = EXIT_OK
    for b in suite:
        if args.names and b.name not in args.names:
            continue
        start = time.monotonic()
        result = run_benchmark(b, index, b.config(workers=_workers(args)))
        elapsed = time.monotonic() - start
        rec = {"name": b.name, "solutions": len(result.solutions),
               "timedOut": result.timed_out, "stats": result.stats.as_dict()}
        if args.ablations:
            rows = ablation_table(b, index, b.config(workers=_workers(args)))
            rec["ablations"] = {k: {c: v[c] for c in ("candidates", "candidatesEvaluated",
                                                      "testsRun")}
                                for k, v in rows.items()}
        records.append(rec)
        if not result.solutions:
            status = EXIT_NO_SOLUTION
        if not args.json:
            line = (f"{b.name:10s} solutions={len(result.solutions)} time={elapsed:.2f}s "
                    f"evaluated={result.stats.candidates_evaluated}")
            if args.ablations:
                a = rec["ablations"]
                line += (f" | with={a['with']['candidatesEvaluated']}"
                         f" noTypes={a['noTypes']['candidatesEvaluated']}"
                         f" noRoles={a['noRoles']['candidatesEvaluated']}")
            print(line, file=out, flush=True)
    if args.json:
        print(json.dumps({"benchmarks": records}, indent=2), file=out)
    return status


COMMANDS = {"index": cmd_index, "search": cmd_search, "splice": cmd_splice,
            "precision": cmd_precision, "bench": cmd_bench}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out, err)
    except _Usage as exc:
        print(f"splicer: {exc}", file=err)
        return EXIT_USAGE
    except SpliceError as exc:
        print(f"splicer: {exc}", file=err)
        return EXIT_USAGE
    except OSError as exc:
        print(f"splicer: {exc}", file=err)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
