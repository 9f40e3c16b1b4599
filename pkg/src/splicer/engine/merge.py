"""Reference renaming: map identifiers a codelet brings along onto variables of
the draft, then validate the completed program."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from ..codelet import ExprCodelet, StmtCodelet
from ..errors import SpliceError
from ..interp.evaluator import Limits
from ..interp.testing import RequirementRunner
from ..interp.vfs import EMPTY_FS, VirtualFS
from ..lang import ast as A
from ..lang.printer import pretty_print
from ..lang.typecheck import check_program
from .config import SpliceConfig, Stats
from .fill import Candidate, fill_nodes, instantiate


@dataclass
class Solution:
    program: A.Program
    donor: int
    donor_rank: int = 0
    discovery_order: int = 0
    renamings: dict = field(default_factory=dict)  # "name" -> draft variable
    substitutions: dict = field(default_factory=dict)  # hole id -> codelet origin

    @property
    def text(self) -> str:
        return pretty_print(self.program)

    def as_dict(self) -> dict:
        return {"donor": self.donor, "donorRank": self.donor_rank,
                "discoveryOrder": self.discovery_order,
                "renamings": dict(sorted(self.renamings.items())),
                "substitutions": {str(h): list(o) for h, o in sorted(self.substitutions.items())},
                "program": self.text}


# ---------------------------------------------------------------------------
# Undefined references and their targets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UndefinedRef:
    name: str
    type: A.Type  # type in the donor
    holes: tuple  # indices into the candidate's holes where the name is unbound


def undefined_refs(cand: Candidate) -> list[UndefinedRef]:
    """Identifiers of the spliced codelets that the draft does not bind (with
    the same type) at the splice point, in first-occurrence order."""
    order: list = []
    where: dict = {}
    for i, (spec, c) in enumerate(zip(cand.specs, cand.fills)):
        for name, t in c.free_vars:
            if spec.scope_type(name) == t:
                continue
            key = (name, t)
            if key not in where:
                order.append(key)
                where[key] = []
            where[key].append(i)
    return [UndefinedRef(n, t, tuple(where[(n, t)])) for n, t in order]


def ref_targets(cand: Candidate, ref: UndefinedRef, type_matching: bool) -> list[str]:
    """Draft variables ``ref`` may be renamed to, in declaration order: visible
    at every hole where it is unbound and not declared by the codelet there."""
    first = cand.specs[ref.holes[0]]
    out = []
    for name, t in first.scope:
        if type_matching and t != ref.type:
            continue
        ok = True
        for i in ref.holes:
            st = cand.specs[i].scope_type(name)
            c = cand.fills[i]
            if st is None or (isinstance(c, StmtCodelet) and name in dict(c.declared)):
                ok = False
                break
            if type_matching and st != ref.type:
                ok = False
                break
        if ok:
            out.append(name)
    return out


# ---------------------------------------------------------------------------
# Scope-aware renaming
# ---------------------------------------------------------------------------


def _rename_expr(e: A.Expr, mapping: dict, bound: frozenset):
    tp = type(e)
    if tp is A.Var:
        if e.name in mapping and e.name not in bound:
            return replace(e, name=mapping[e.name])
        return e
    changes = {}
    for fname in A._CHILD_FIELDS[tp]:
        value = getattr(e, fname)
        if value is None:
            continue
        if isinstance(value, tuple):
            new = tuple(_rename_expr(v, mapping, bound) for v in value)
            if any(a is not b for a, b in zip(new, value)):
                changes[fname] = new
        else:
            new = _rename_expr(value, mapping, bound)
            if new is not value:
                changes[fname] = new
    return replace(e, **changes) if changes else e


def _rename_stmt(s: A.Stmt, mapping: dict, bound: set):
    """Rename free occurrences in ``s``; declarations are added to ``bound``."""
    tp = type(s)
    fb = frozenset(bound)
    if tp is A.Let:
        init = _rename_expr(s.init, mapping, fb) if s.init is not None else None
        bound.add(s.name)
        return replace(s, init=init)
    if tp is A.ExprStmt:
        return replace(s, expr=_rename_expr(s.expr, mapping, fb))
    if tp is A.Return:
        return s if s.value is None else replace(s, value=_rename_expr(s.value, mapping, fb))
    if tp is A.If:
        return replace(s, guard=_rename_expr(s.guard, mapping, fb),
                       then=_rename_stmt(s.then, mapping, set(bound)),
                       orelse=(_rename_stmt(s.orelse, mapping, set(bound))
                               if s.orelse is not None else None))
    if tp is A.While:
        return replace(s, guard=_rename_expr(s.guard, mapping, fb),
                       body=_rename_stmt(s.body, mapping, set(bound)))
    if tp is A.Block:
        inner = set(bound)
        return replace(s, stmts=tuple(_rename_stmt(c, mapping, inner) for c in s.stmts))
    return s


def rename_codelet(c, mapping: dict):
    """Copy of ``c`` with free occurrences of ``mapping``'s keys renamed."""
    if not mapping:
        return c
    if isinstance(c, ExprCodelet):
        return replace(c, expr=_rename_expr(c.expr, mapping, frozenset()))
    bound: set = set()
    return replace(c, stmts=tuple(_rename_stmt(s, mapping, bound) for s in c.stmts))


# ---------------------------------------------------------------------------
# merge
# ---------------------------------------------------------------------------


class Validator:
    """Checks completed programs against a draft's requirement: the program
    must type-check, then pass its tests or automaton."""

    def __init__(self, draft, fs: VirtualFS = EMPTY_FS, limits: Limits = Limits()):
        self.draft = draft
        self.run = RequirementRunner(draft.requirement, fs, limits, draft.registry)

    def __call__(self, program: A.Program, stats: Stats) -> bool:
        try:
            check_program(program, self.draft.registry)
        except SpliceError:
            return False
        stats.tests_run += 1
        return self.run(program)


def merge(cand: Candidate, cfg: SpliceConfig, validate: Callable, stats: Stats,
          should_stop: Callable[[], bool] = lambda: False) -> Optional[Solution]:
    """First renaming of ``cand``'s undefined references that yields a
    type-correct program satisfying the requirement, or ``None``.

    Renamings are tried in product order over the references (first
    occurrence first), each reference trying its targets in declaration
    order. Every complete renaming counts as one evaluated candidate; whole
    subtrees known to be ill-typed are counted without being built.
    """
    refs = undefined_refs(cand)
    targets = [ref_targets(cand, r, cfg.type_matching) for r in refs]
    sizes = [len(t) for t in targets]

    def leaves(start: int) -> int:
        return math.prod(sizes[start:])

    if any(s.kind == "expr" and c.type != s.type for s, c in zip(cand.specs, cand.fills)):
        stats.candidates_evaluated += leaves(0)
        return None

    chosen: list = []

    def build() -> Solution:
        per_hole = [{} for _ in cand.specs]
        renamings = {}
        for r, target in zip(refs, chosen):
            renamings[r.name] = target
            for i in r.holes:
                per_hole[i][r.name] = target
        fills = [rename_codelet(c, m) for c, m in zip(cand.fills, per_hole)]
        program = instantiate(cand.draft.program, cand.specs, [fill_nodes(c) for c in fills])
        return Solution(program, cand.donor, renamings=renamings,
                        substitutions=cand.substitutions)

    def go(i: int) -> Optional[Solution]:
        if i == len(refs):
            if should_stop():
                raise _Stopped
            stats.candidates_evaluated += 1
            sol = build()
            return sol if validate(sol.program, stats) else None
        ref = refs[i]
        for target in targets[i]:
            if not _target_fits(cand, ref, target):
                stats.candidates_evaluated += leaves(i + 1)
                continue
            chosen.append(target)
            found = go(i + 1)
            chosen.pop()
            if found is not None:
                return found
        return None

    try:
        return go(0)
    except _Stopped:
        return None


class _Stopped(Exception):
    """Raised inside the renaming search when the caller asks to stop."""


def _target_fits(cand: Candidate, ref: UndefinedRef, target: str) -> bool:
    return all(cand.specs[i].scope_type(target) == ref.type for i in ref.holes)
