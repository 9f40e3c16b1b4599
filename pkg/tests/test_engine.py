from __future__ import annotations

import pytest

from randprog import make_trial
from splicer.codelet import (ASSIGN_RHS, Donor, extract_expr_codelets, extract_stmt_codelets)
from splicer.engine import (Candidate, SpliceConfig, Stats, Validator, ablation_run, fill,
                            has_dead_return, hole_specs, measure_precision, merge, post_filter,
                            splice, valid)
from splicer.engine.merge import Solution
from splicer.errors import EmptyIndex, KindMismatch
from splicer.interp import satisfies
from splicer.lang import BOOL, INT, parse_draft, parse_program, pretty_print
from splicer.lang import ast as A
from splicer.lang.typecheck import check_program
from splicer.search import CorpusIndex, build_index_from_sources

SIEVE_DONOR = """
// sieve of eratosthenes
void sieve(boolean[] p) {
  p[1] = false;
  int l = p.length - 1;
  for (int i = 2; i <= l; i++)
    p[i] = true;
  for (int i = 2; i <= l / 2; i++)
    for (int j = 2; j <= l / i; j++)
      p[i * j] = false;
}
"""

SIEVE_DRAFT = """
/* COMMENT:
 * use sieve of eratosthenes
 * to test primality
 * TEST:
 * return sieve(1) == false && sieve(2) == true && sieve(29) == true &&
 *        sieve(4) == false && sieve(91) == false;
 */
boolean sieve(int num) {
  boolean[] prime = new boolean[101];
  for (int i = ??; i <= num; ++i)
    prime[i] = ??;
  // build a table
  ??;
  return prime[num];
}
"""

SIEVE_COMPLETION = """
boolean sieve(int num) {
  boolean[] prime = new boolean[101];
  for (int i = 2; i <= num; ++i)
    prime[i] = true;
  for (int i = 2; i <= num / 2; i++)
    for (int j = 2; j <= num / i; j++)
      prime[i * j] = false;
  return prime[num];
}
"""

HEADER = "/* COMMENT: x TEST: return f(2) == 3; */\n"

EXHAUSTIVE = dict(max_solutions=10 ** 6, search_time_limit=None, exhaustive=True, workers=1)


def donor(text, sid=0):
    return Donor.prepare(parse_program(text), sid)


def spec_for(draft, hole_index=0):
    return hole_specs(draft)[hole_index]


# --- valid ---------------------------------------------------------------------


def test_valid_bool_constant_in_assignment():
    d = parse_draft(SIEVE_DRAFT)
    spec = spec_for(d, 1)
    c = next(c for c in extract_expr_codelets(donor(SIEVE_DONOR))
             if type(c.expr) is A.BoolLit and c.expr.value and c.role == ASSIGN_RHS)
    assert valid(d, spec, c, SpliceConfig())


def test_valid_rejects_wrong_type():
    d = parse_draft(SIEVE_DRAFT)
    spec = spec_for(d, 1)
    ints = [c for c in extract_expr_codelets(donor(SIEVE_DONOR)) if c.type == INT]
    assert ints
    for cfg in (SpliceConfig(), SpliceConfig(role_matching=False)):
        assert not any(valid(d, spec, c, cfg) for c in ints)


def test_role_matching_on_guard_hole():
    d = parse_draft("/* COMMENT: x TEST: return f(1) == 1; */"
                    " int f(int n) { boolean b = true; while (??) n--; return n; }")
    c = next(c for c in extract_expr_codelets(donor("int g(int n) { boolean b = false; b = n > 3; return n; }"))
             if c.type == BOOL and c.role == ASSIGN_RHS)
    spec = spec_for(d)
    assert not valid(d, spec, c, SpliceConfig())
    assert valid(d, spec, c, SpliceConfig(role_matching=False))


def test_valid_kind_mismatch():
    d = parse_draft(SIEVE_DRAFT)
    stmt = extract_stmt_codelets(donor(SIEVE_DONOR))[0]
    with pytest.raises(KindMismatch):
        valid(d, spec_for(d, 0), stmt, SpliceConfig())


def test_valid_stmt_hole_ignores_roles():
    d = parse_draft(SIEVE_DRAFT)
    spec = spec_for(d, 2)
    stmts = extract_stmt_codelets(donor(SIEVE_DONOR))
    on = [valid(d, spec, c, SpliceConfig()) for c in stmts]
    off = [valid(d, spec, c, SpliceConfig(role_matching=False)) for c in stmts]
    assert on == off and any(on)


# --- fill ----------------------------------------------------------------------


def test_fill_sieve_contains_loop_completion():
    d = parse_draft(SIEVE_DRAFT)
    cands = list(fill(d, parse_program(SIEVE_DONOR), SpliceConfig()))
    stats = Stats()
    validate = Validator(d)
    sols = [s for c in cands for s in [merge(c, SpliceConfig(), validate, stats)] if s]
    assert any(s.program == parse_program(SIEVE_COMPLETION) for s in sols)


def test_fill_hole_free_draft():
    d = parse_draft(HEADER + "int f(int x) { return x + 1; }")
    cands = list(fill(d, parse_program("int g() { return 0; }"), SpliceConfig()))
    assert len(cands) == 1 and cands[0].program == d.program


def test_fill_no_valid_codelet():
    d = parse_draft(HEADER + "int f(int x) { boolean b = ??; return x; }")
    assert list(fill(d, parse_program("int g(int y) { return y * 2 + 1; }"), SpliceConfig())) == []


def test_fill_order_is_smallest_first():
    d = parse_draft(HEADER + "int f(int x) { return ??; }")
    cands = list(fill(d, parse_program("int g(int y) { return y * 2 + 1; }"), SpliceConfig()))
    sizes = [A.node_count(c.fills[0].expr) for c in cands]
    assert sizes == sorted(sizes)


# --- merge ---------------------------------------------------------------------


def test_merge_renames_to_draft_variables():
    d = parse_draft(SIEVE_DRAFT)
    cfg = SpliceConfig()
    validate = Validator(d)
    want = parse_program(SIEVE_COMPLETION)
    sols = [s for c in fill(d, parse_program(SIEVE_DONOR), cfg)
            for s in [merge(c, cfg, validate, Stats())] if s is not None]
    match = [s for s in sols if s.program == want]
    assert match and match[0].renamings == {"p": "prime", "l": "num"}


def test_merge_without_undefined_refs():
    d = parse_draft(HEADER + "int f(int x) { return x + 1; }")
    cand = next(fill(d, parse_program("int g() { return 0; }"), SpliceConfig()))
    sol = merge(cand, SpliceConfig(), Validator(d), Stats())
    assert sol is not None and sol.program == d.program and sol.renamings == {}


def test_merge_fails_without_target_of_type():
    d = parse_draft("/* COMMENT: x TEST: return f(2) == 1; */ int f(int x) { ??; return x; }")
    g = 'int g(String s) { int n = strLength(s); return n; }'
    stats = Stats()
    sols = [merge(c, SpliceConfig(type_matching=False), Validator(d), stats)
            for c in fill(d, parse_program(g), SpliceConfig(type_matching=False))]
    assert not any(s is not None and "strLength" in pretty_print(s.program) for s in sols)


# --- post_filter ---------------------------------------------------------------


def _sol(text):
    return Solution(parse_program(text), 0)


def test_post_filter_drops_dead_returns():
    dead = _sol("int f(int x) { return x; return x; }")
    ok = _sol("int f(int x) { return x; }")
    assert has_dead_return(dead.program)
    assert post_filter([dead, ok]) == [ok]
    assert post_filter([ok]) == [ok]
    assert post_filter([]) == []


def test_post_filter_extra_layer():
    a, b = _sol("int f(int x) { return x; }"), _sol("int f(int x) { return 1; }")
    assert post_filter([a, b], (lambda s: "1" not in s.text,)) == [a]


# --- splice --------------------------------------------------------------------


def test_splice_sieve_bundled(corpus_index, suite):
    b = next(b for b in suite if b.name == "sieve")
    result = splice(b.draft(), corpus_index, b.config())
    assert result.solutions
    top = result.solutions[0]
    d = b.draft()
    assert satisfies(top.program, d.requirement)
    order = [(s.donor_rank, s.discovery_order) for s in result.solutions]
    assert order == sorted(order)


def test_splice_incompatible_corpus_returns_nothing():
    idx = build_index_from_sources([("a.spl", "// nothing\nString name() { return \"x\"; }\n")])
    d = parse_draft(SIEVE_DRAFT)
    result = splice(d, idx, SpliceConfig(k=len(idx)))
    assert result.solutions == [] and not result.timed_out


def test_splice_empty_index():
    with pytest.raises(EmptyIndex):
        splice(parse_draft(SIEVE_DRAFT), CorpusIndex())


def test_splice_deterministic(corpus_index, suite):
    b = next(b for b in suite if b.name == "matrix")
    r1 = splice(b.draft(), corpus_index, b.config())
    r2 = splice(b.draft(), corpus_index, b.config())
    assert r1.as_dict() == r2.as_dict()


def test_splice_time_limit_marks_timeout(corpus_index, suite):
    b = next(b for b in suite if b.name == "quicksort")
    result = splice(b.draft(), corpus_index, b.config(search_time_limit=0.001))
    assert result.timed_out


# --- ablation_run / precision ----------------------------------------------------


def test_ablation_sieve_types_ordering(corpus_index, suite):
    b = next(b for b in suite if b.name == "sieve")
    with_sols, with_stats = ablation_run(b.draft(), corpus_index, b.config())
    no_sols, no_stats = ablation_run(b.draft(), corpus_index, b.config(), type_matching=False)
    assert no_stats["candidatesEvaluated"] > with_stats["candidatesEvaluated"]
    assert {s.text for s in with_sols} == {s.text for s in no_sols}
    assert "wallTime" in with_stats


def test_ablation_roles_on_stmt_only_draft():
    d = parse_draft(SIEVE_DRAFT.replace("int i = ??", "int i = 2").replace("prime[i] = ??", "prime[i] = true"))
    idx = build_index_from_sources([("s.spl", SIEVE_DONOR)])
    a = ablation_run(d, idx, SpliceConfig())
    b = ablation_run(d, idx, SpliceConfig(), role_matching=False)
    assert [s.text for s in a[0]] == [s.text for s in b[0]]
    assert {k: v for k, v in a[1].items() if k != "wallTime"} == \
           {k: v for k, v in b[1].items() if k != "wallTime"}


def test_precision_single_valid_donor():
    idx = build_index_from_sources([("s.spl", SIEVE_DONOR +
                                     "// sieve table\nint sieveCount(int n) { return n; }\n")])
    p = measure_precision(parse_draft(SIEVE_DRAFT), idx, 2)
    assert (p.high_quality, p.k, p.value) == (1, 2, 0.5)


# --- properties over random trials -------------------------------------------------


@pytest.mark.parametrize("seed", range(1000, 1030))
def test_solutions_are_sound(seed):
    t = make_trial(seed)
    d, idx = t.draft(), t.index()
    for sol in splice(d, idx, SpliceConfig(**EXHAUSTIVE)):
        assert not A.has_holes(sol.program)
        check_program(sol.program, d.registry)
        assert satisfies(sol.program, d.requirement)


@pytest.mark.parametrize("seed", range(2000, 2030))
def test_heuristics_never_add_work(seed):
    t = make_trial(seed)
    d, idx = t.draft(), t.index()
    on = splice(d, idx, SpliceConfig(**EXHAUSTIVE)).stats
    for off in (dict(type_matching=False), dict(role_matching=False)):
        assert on.candidates_evaluated <= splice(d, idx, SpliceConfig(**{**EXHAUSTIVE, **off})).stats.candidates_evaluated


@pytest.mark.parametrize("seed", range(3000, 3015))
def test_schedule_independence(seed):
    t = make_trial(seed)
    d, idx = t.draft(), t.index()
    one = splice(d, idx, SpliceConfig(workers=1, max_solutions=5))
    many = splice(d, idx, SpliceConfig(workers=4, max_solutions=5))
    assert one.as_dict() == many.as_dict()
