"""Acceptance suite: one group of tests per criterion, summarized at the end of
the run as one PASS/FAIL line per criterion (see conftest.py)."""

from __future__ import annotations

import itertools
import json
import math
import random
import subprocess
import sys
import time

import pytest

from oracle import brute_force, normal_form
from randprog import make_trial
from splicer.bench import ablation_table, run_benchmark
from splicer.engine import SpliceConfig, measure_precision, splice
from splicer.interp import ApiEvent, Limits, check_automaton, evaluate, run_automaton, satisfies
from splicer.lang import parse_draft, parse_program
from splicer.search import (QueryWeights, build_index_from_sources, cosine, jaccard, knn_query,
                            save_index)
from splicer.search.index import draft_features

EXHAUSTIVE = dict(max_solutions=10 ** 6, search_time_limit=None, exhaustive=True, workers=1)


def bench(suite, name):
    return next(b for b in suite if b.name == name)


# ---------------------------------------------------------------------------
# 1. end-to-end sieve
# ---------------------------------------------------------------------------


def trial_division(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(math.isqrt(n)) + 1))


@pytest.mark.criterion(1)
def test_sieve_end_to_end(corpus_index, suite):
    assert len(corpus_index) >= 50
    b = bench(suite, "sieve")
    names = [e.program.name for e in corpus_index.entries]
    assert names.count("sieve") == 1 and len(names) - 1 >= 40
    start = time.monotonic()
    result = splice(b.draft(), corpus_index, b.config())
    elapsed = time.monotonic() - start
    assert result.solutions
    assert elapsed < 10.0
    agreeing = []
    for sol in result.solutions:
        program = parse_program(sol.text)  # standalone: re-parse the printed solution
        got = {n: evaluate(program, [n])[0] for n in range(1, 101)}
        assert got[1] is False and got[2] is True and got[29] is True
        if all(got[n] == trial_division(n) for n in got):
            agreeing.append(sol)
    assert agreeing
    assert agreeing[0] is result.solutions[0]


# ---------------------------------------------------------------------------
# 2. benchmark suite
# ---------------------------------------------------------------------------

_suite_times: dict = {}
SUITE_NAMES = ["sieve", "binsearch", "matrix", "lcs", "quicksort", "csv", "face"]


@pytest.mark.criterion(2)
@pytest.mark.parametrize("name", SUITE_NAMES)
def test_benchmark_solved(corpus_index, suite, name):
    b = bench(suite, name)
    start = time.monotonic()
    result = run_benchmark(b, corpus_index)
    elapsed = time.monotonic() - start
    _suite_times[name] = elapsed
    assert result.solutions, name
    d = b.draft()
    for sol in result.solutions:
        assert satisfies(parse_program(sol.text, d.registry), d.requirement, b.fs(), b.limits,
                         d.registry)
    assert elapsed < 60.0


@pytest.mark.criterion(2)
def test_benchmark_suite_total_time():
    assert set(_suite_times) == set(SUITE_NAMES)
    assert sum(_suite_times.values()) < 300.0


# ---------------------------------------------------------------------------
# 3. ablation orderings
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def ablations(corpus_index, suite):
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = ablation_table(bench(suite, name), corpus_index)
        return cache[name]
    return get


@pytest.mark.criterion(3)
@pytest.mark.parametrize("name", SUITE_NAMES)
def test_ablation_orderings(suite, ablations, name):
    d = bench(suite, name).draft()
    rows = ablations(name)
    with_, no_types, no_roles = rows["with"], rows["noTypes"], rows["noRoles"]
    print(f"{name}: with={with_['candidatesEvaluated']} noTypes={no_types['candidatesEvaluated']}"
          f" noRoles={no_roles['candidatesEvaluated']}")
    if d.expr_holes:
        assert no_types["candidatesEvaluated"] > with_["candidatesEvaluated"]
        assert no_roles["candidatesEvaluated"] >= with_["candidatesEvaluated"]
    else:
        for key in ("candidates", "candidatesEvaluated", "testsRun"):
            assert no_roles[key] == with_[key], key
        assert no_roles["solutions"] == with_["solutions"]


@pytest.mark.criterion(3)
def test_lcs_is_statement_holes_only(suite):
    d = bench(suite, "lcs").draft()
    assert d.stmt_holes and not d.expr_holes


# ---------------------------------------------------------------------------
# 4. heuristic soundness on random trials
# ---------------------------------------------------------------------------


@pytest.mark.criterion(4)
@pytest.mark.parametrize("seed", range(200))
def test_heuristic_soundness(seed):
    t = make_trial(seed)
    d, idx = t.draft(), t.index()

    def solutions(**switches):
        return {s.text for s in splice(d, idx, SpliceConfig(**EXHAUSTIVE, **switches))}

    on = solutions()
    assert on == solutions(type_matching=False)
    assert on <= solutions(role_matching=False)


# ---------------------------------------------------------------------------
# 5. k-NN against brute force
# ---------------------------------------------------------------------------

WORDS = ["sieve", "prime", "table", "matrix", "search", "binary", "sort", "quick", "read",
         "file", "count", "string", "face", "detect", "image", "sum", "array", "parse", "lines",
         "graph", "path", "tree", "node", "list", "merge"]


def random_function(rng, i):
    name = rng.choice(WORDS) + rng.choice(WORDS).capitalize()
    params = rng.sample(WORDS, rng.randint(0, 3))
    comment = " ".join(rng.choice(WORDS) for _ in range(rng.randint(0, 6)))
    local = rng.choice(WORDS) + "Value"
    body = f"int {local} = {len(params)};" + "".join(f" {local} = {local} + {p};" for p in params)
    text = f"int {name}({', '.join('int ' + p for p in params)}) {{ {body} return {local}; }}\n"
    return (f"// {comment}\n" if comment else "") + text


def brute_force_knn(index, q, k, w):
    scored = [(-(w.w_nl * cosine(q.nl_weights, e.features.nl_weights)
                 + w.w_names * jaccard(q.names, e.features.names)), e.source_id)
              for e in index.entries]
    scored.sort()
    return [(sid, -neg) for neg, sid in scored[:k]]


def plain_score(q, e, w):
    a, b = q.nl_weights, e.features.nl_weights
    dot = sum(a[t] * b[t] for t in a if t in b)
    na, nb = math.sqrt(sum(x * x for x in a.values())), math.sqrt(sum(x * x for x in b.values()))
    cos = dot / (na * nb) if na and nb else 0.0
    union = q.names | e.features.names
    jac = len(q.names & e.features.names) / len(union) if union else 0.0
    return w.w_nl * cos + w.w_names * jac


@pytest.mark.criterion(5)
@pytest.mark.parametrize("seed", range(100))
def test_knn_matches_brute_force(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 200)
    funcs = [random_function(rng, i) for i in range(n)]
    for _ in range(rng.randint(0, 5)):  # duplicates force score ties
        funcs.append(rng.choice(funcs))
    rng.shuffle(funcs)
    index = build_index_from_sources([("c.spl", "".join(funcs))])
    query_fn = random_function(rng, 0).split("\n")
    body = query_fn[-2] if len(query_fn) > 2 else query_fn[0]
    comment = " ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 5)))
    body = body.replace("return", "int extra = ??; return", 1)
    draft = parse_draft(f"/* COMMENT: {comment} TEST: return true; */\n{body}")
    w_nl = rng.choice([0.0, 0.2, 0.5, 0.8, 1.0, rng.random()])
    w = QueryWeights(w_nl, 1.0 - w_nl)
    k = rng.randint(1, len(index) + 3)
    got = knn_query(index, draft, k, w)
    q = draft_features(index, draft)
    assert got == brute_force_knn(index, q, k, w)
    for sid, s in got:
        assert s == pytest.approx(plain_score(q, index.entry(sid), w), abs=1e-12)


# ---------------------------------------------------------------------------
# 6. precision ground truth
# ---------------------------------------------------------------------------

PRECISION_DRAFT = """/* COMMENT:
 * triple the value
 * TEST:
 * return triple(2) == 6 && triple(5) == 15 && triple(0) == 0;
 */
int triple(int n) {
  return ??;
}
"""

_GOOD = ["x * 3", "3 * x", "x + x + x", "x * 3 + 0", "(x + x) + x"]
_BAD = ["x + 3", "x * 2", "x - 1", "x * x", "x + 1"]


def precision_corpus(h: int) -> list[str]:
    """Five retrievable functions, ``h`` of which can complete the draft, plus
    valid donors that share no terms with the draft and rank below them."""
    funcs = []
    for i in range(5):
        expr = _GOOD[i] if i < h else _BAD[i]
        funcs.append(f"// triple value variant {i}\nint tripleValue{i}(int x) {{ return {expr}; }}\n")
    for i in range(3):
        funcs.append(f"// unrelated helper\nint helper{i}(int q) {{ return q * 3; }}\n")
    return funcs


@pytest.mark.criterion(6)
@pytest.mark.parametrize("h, k", [(0, 5), (2, 5), (5, 5)])
def test_precision_ground_truth(h, k):
    index = build_index_from_sources([("p.spl", "".join(precision_corpus(h)))])
    draft = parse_draft(PRECISION_DRAFT)
    top = {sid for sid, _ in knn_query(index, draft, k)}
    assert top == set(range(5))
    p = measure_precision(draft, index, k)
    assert (p.high_quality, p.k) == (h, k)
    assert p.value == h / k
    # exhaustive per-donor check of the planted ground truth
    for sid, ok in p.donors:
        assert ok == (sid < h)
        assert bool(brute_force(draft, [index.entry(sid).program])) == ok


# ---------------------------------------------------------------------------
# 7. tf-idf boost
# ---------------------------------------------------------------------------


@pytest.mark.criterion(7)
def test_boost_ratio_six():
    index = build_index_from_sources([("b.spl",
                                       "// use sieve to test\nint sieve(int n) { return n; }\n"
                                       "// nothing in common\nint other(int q) { return q; }\n")])
    w = index.entry(0).features.nl_weights
    assert index.doc_freq["siev"] == index.doc_freq["test"]
    assert abs(w["siev"] / w["test"] - 6.0) <= 1e-9


@pytest.mark.criterion(7)
@pytest.mark.parametrize("tf", [1, 2, 3, 7])
def test_boost_ratio_general(tf):
    words = " ".join(["sieve test"] * tf)
    index = build_index_from_sources([("b.spl",
                                       f"// {words}\nint sieve(int n) {{ return n; }}\n"
                                       "int other(int q) { return q; }\n")])
    w = index.entry(0).features.nl_weights
    assert w["siev"] / w["test"] == pytest.approx((tf + 5) / tf, abs=1e-9)


# ---------------------------------------------------------------------------
# 8. automaton checking
# ---------------------------------------------------------------------------

FACE_BODIES = {
    "ordered": ["CascadeClassifier c = newClassifier(\"f.xml\");", "Mat m = imread(input);",
                "MatOfRect r = detectMultiScale(c, m);", "rectangle(m, r);", "imwrite(output, m);"],
    "write_before_draw": ["CascadeClassifier c = newClassifier(\"f.xml\");", "Mat m = imread(input);",
                          "MatOfRect r = detectMultiScale(c, m);", "imwrite(output, m);",
                          "rectangle(m, r);"],
    "no_detection": ["CascadeClassifier c = newClassifier(\"f.xml\");", "Mat m = imread(input);",
                     "imwrite(output, m);"],
    "read_first": ["Mat m = imread(input);", "CascadeClassifier c = newClassifier(\"f.xml\");",
                   "MatOfRect r = detectMultiScale(c, m);", "rectangle(m, r);", "imwrite(output, m);"],
}


def simulate(aut_text: str, trace) -> bool:
    """Brute-force reading of the automaton file: set-of-states simulation."""
    trans, start, accept, wildcard = [], None, set(), True
    for line in aut_text.splitlines():
        line = line.split("#")[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        parts = rest.split()
        if key == "start":
            start = parts[0]
        elif key == "accept":
            accept = set(parts)
        elif key == "wildcard":
            wildcard = parts[0] == "on"
        elif key == "trans":
            src, label, dst = parts
            name, _, recv = label.partition("@")
            trans.append((src, name, recv or None, dst))
    states = {start}
    for ev in trace:
        labels = [(n, r) for _, n, r, _ in trans if n == ev.fname and r in (None, ev.receiver_type)]
        nxt = set()
        for s in states:
            exact = [d for src, n, r, d in trans if src == s and n == ev.fname and r == ev.receiver_type]
            loose = [d for src, n, r, d in trans if src == s and n == ev.fname and r is None]
            moves = exact or loose
            if moves:
                nxt.update(moves)
            elif not labels and wildcard:
                nxt.add(s)
        states = nxt
    return bool(states & accept)


@pytest.mark.criterion(8)
def test_only_ordered_candidate_accepted(suite):
    b = bench(suite, "face")
    d = b.draft()
    aut_text = open(d.requirement.path).read()
    accepted = []
    for label, body in FACE_BODIES.items():
        program = parse_program("void run() { String input = \"lena.img\"; String output = \"faces.img\"; "
                                + " ".join(body) + " }", d.registry)
        from splicer.interp.testing import driver_trace
        completed, trace = driver_trace(program, d.requirement, b.fs(), b.limits, d.registry)
        assert completed, label
        verdict = run_automaton(program, d.requirement, b.fs(), b.limits, d.registry)
        assert verdict == simulate(aut_text, trace), label
        if verdict:
            accepted.append(label)
    assert len(FACE_BODIES) >= 3 and accepted == ["ordered"]


@pytest.mark.criterion(8)
def test_permuted_traces_rejected(suite):
    d = bench(suite, "face").draft()
    aut = d.requirement.automaton
    aut_text = open(d.requirement.path).read()
    calls = [("newClassifier", None), ("imread", None), ("detectMultiScale", "CascadeClassifier"),
             ("rectangle", "Mat"), ("imwrite", None)]
    for n in range(0, len(calls) + 1):
        for perm in itertools.permutations(calls, n):
            trace = [ApiEvent(f, (), r, i) for i, (f, r) in enumerate(perm)]
            verdict = check_automaton(trace, aut)
            assert verdict == simulate(aut_text, trace)
            assert verdict == (list(perm) == calls)


# ---------------------------------------------------------------------------
# 9. schedule independence through the CLI
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def cli_index(tmp_path_factory, corpus_index):
    path = tmp_path_factory.mktemp("cli") / "corpus.idx"
    save_index(corpus_index, path)
    return path


def run_cli(args, env_workers=None):
    import os
    env = dict(os.environ)
    env.pop("SPLICE_WORKERS", None)
    return subprocess.run([sys.executable, "-m", "splicer.cli", *args], capture_output=True,
                          text=True, env=env)


@pytest.mark.criterion(9)
@pytest.mark.parametrize("name", SUITE_NAMES)
def test_workers_byte_identical(suite, cli_index, name):
    b = bench(suite, name)
    args = ["splice", str(cli_index), str(b.draft_path), "--json", "--fuel", str(b.limits.step_fuel),
            "--test-time-limit", str(b.limits.wall_clock)]
    if b.fs_path:
        args += ["--fs-manifest", str(b.fs_path)]
    one = run_cli(args + ["--workers", "1"])
    many = run_cli(args + ["--workers", "8"])
    assert one.returncode == 0, one.stderr
    assert many.returncode == 0, many.stderr
    assert one.stdout == many.stdout
    assert json.loads(one.stdout)["solutions"]


# ---------------------------------------------------------------------------
# 10. brute-force synthesis oracle
# ---------------------------------------------------------------------------


@pytest.mark.criterion(10)
@pytest.mark.parametrize("seed", range(5000, 5100))
def test_matches_brute_force_synthesis(seed):
    t = make_trial(seed, max_donors=5)
    d, idx = t.draft(), t.index()
    assert len(idx) <= 5 and len(d.holes) <= 2
    assert all(len(d.info.hole_scopes.get(h, ())) <= 4 for h in d.holes)
    want = brute_force(d, [e.program for e in idx.entries])
    for types in (True, False):
        cfg = SpliceConfig(**EXHAUSTIVE, role_matching=False, type_matching=types)
        got = {normal_form(s.program) for s in splice(d, idx, cfg)}
        assert got == want
    with_roles = {normal_form(s.program) for s in splice(d, idx, SpliceConfig(**EXHAUSTIVE))}
    assert with_roles <= want
