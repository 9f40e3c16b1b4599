"""Drafts: a function with holes, a natural-language comment and a requirement.

A draft file carries a block comment (before or inside the function)::

    /* COMMENT:
     * use sieve of eratosthenes to test primality
     * TEST:
     * __solution__
     * return sieve(1) == false && sieve(2) == true;
     */

``TEST:`` holds statements forming the body of a boolean test function. A
requirement may instead name an automaton file with ``API_cons("f.aut");``;
any remaining ``TEST`` statements then form the driver that exercises the
draft while its API calls are recorded.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Union

from ..errors import (AmbiguousType, DuplicateSolutionMarker, MissingRequirement,
                      NotAnExprHole, SpliceSyntaxError)
from . import ast as A
from .desugar import desugar
from .lexer import tokenize
from .parser import clean_comment, parse_function_text, parse_statements
from .typecheck import TypeInfo, check_block, check_program, function_table

RESULT_VAR = "__result__"
_API_CONS_RE = re.compile(r'API_cons\s*\(\s*"([^"]*)"\s*\)\s*;?')
_SECTION_RE = re.compile(r"\b(COMMENT|TEST):")


@dataclass(frozen=True)
class Tests:
    block: A.Block  # as written
    expanded: A.Block  # after __solution__ expansion
    solution_marker_present: bool = False


@dataclass(frozen=True)
class AutomatonRequirement:
    automaton: object  # interp.automaton.ApiAutomaton
    path: str
    driver: A.Block  # expanded driver statements
    solution_marker_present: bool = False


Requirement = Union[Tests, AutomatonRequirement]


@dataclass
class Draft:
    program: A.Program  # surface syntax, holes included
    comment: str
    requirement: Requirement
    expr_holes: list[int]
    stmt_holes: list[int]
    # every comment in the file other than the header's TEST part, for search
    comments: list[str] = field(default_factory=list)
    registry: object = None
    core: A.Program = None  # desugared program the engine works on
    info: TypeInfo = None
    path: Optional[str] = None

    @property
    def holes(self) -> list[int]:
        return sorted(self.expr_holes + self.stmt_holes)

    def hole_kind(self, hole_id: int) -> str:
        if hole_id in self.expr_holes:
            return "expr"
        if hole_id in self.stmt_holes:
            return "stmt"
        raise KeyError(hole_id)


def _registry(registry):
    if registry is None:
        from ..interp.api import shared_registry
        return shared_registry()
    return registry


def parse_program(text: str, registry=None) -> A.Program:
    """Parse and type-check one function. Holes are allowed and left untyped
    unless their context forces a type."""
    prog, _, _ = parse_function_text(text)
    check_program(prog, _registry(registry))
    return prog


# ---------------------------------------------------------------------------
# __solution__ expansion
# ---------------------------------------------------------------------------


def _solution_call(program: A.Program, scope_names) -> Optional[list[A.Stmt]]:
    if not all(q.name in scope_names for q in program.params):
        return None
    call = A.Call(program.name, tuple(A.Var(q.name) for q in program.params))
    if program.ret.kind == "unit":
        return [A.ExprStmt(call)]
    return [A.Let(RESULT_VAR, program.ret, call)]


def expand_marker(block: A.Block, program: A.Program, marker_scopes) -> A.Block:
    """Replace each ``__solution__`` by an invocation of ``program`` when all its
    parameter names are visible there, and by nothing otherwise."""

    def go(s):
        tp = type(s)
        if tp is A.SolutionMarker:
            names = {n for n, _ in marker_scopes.get(s.id, ())}
            return _solution_call(program, names) or []
        if tp is A.Block:
            out = []
            for c in s.stmts:
                r = go(c)
                out.extend(r if isinstance(r, list) else [r])
            return replace(s, stmts=tuple(out))
        if tp is A.If:
            return replace(s, then=_one(go(s.then)),
                           orelse=_one(go(s.orelse)) if s.orelse is not None else None)
        if tp in (A.While, A.For):
            return replace(s, body=_one(go(s.body)))
        return s

    return go(block)


def _one(r) -> A.Stmt:
    if isinstance(r, list):
        return r[0] if len(r) == 1 else A.Block(tuple(r))
    return r


def _count_markers(block: A.Block) -> int:
    return sum(1 for n in A.walk(block) if isinstance(n, A.SolutionMarker))


def check_test_block(block: A.Block, program: A.Program, registry, ret: A.Type):
    """Type-check a test/driver block and return it with ``__solution__`` expanded."""
    functions = function_table(registry, program)

    def on_marker(scope):
        names = {n for n, _ in scope}
        if _solution_call(program, names) and program.ret.kind != "unit":
            return [(RESULT_VAR, program.ret)]
        return []

    info = check_block(block, registry, functions, ret, on_marker=on_marker)
    expanded = expand_marker(block, program, info.marker_scopes)
    check_block(expanded, registry, functions, ret)
    return expanded


# ---------------------------------------------------------------------------
# Draft files
# ---------------------------------------------------------------------------


def _split_header(text: str) -> tuple[str, Optional[str]]:
    """``(comment section, test section or None)`` of a cleaned header."""
    comment, test = [], None
    current = None
    pos = 0
    parts = []
    for m in _SECTION_RE.finditer(text):
        parts.append((current, text[pos:m.start()]))
        current = m[1]
        pos = m.end()
    parts.append((current, text[pos:]))
    for section, body in parts:
        if section == "COMMENT":
            comment.append(body.strip())
        elif section == "TEST":
            test = (test + "\n" if test else "") + body
    return "\n".join(c for c in comment if c), test


def parse_draft(text: str, *, registry=None, base_dir: str | Path | None = None,
                path: Optional[str] = None) -> Draft:
    from ..interp.automaton import load_automaton

    registry = _registry(registry)
    prog, holes, comments = parse_function_text(text)
    header = None
    others = []
    for c in comments:
        cleaned = clean_comment(c)
        if header is None and c.block and (_SECTION_RE.search(cleaned)
                                           or _API_CONS_RE.search(cleaned)):
            header = cleaned
        else:
            others.append(cleaned)
    if header is None:
        raise MissingRequirement("draft has no COMMENT/TEST header")

    cons = _API_CONS_RE.findall(header)
    comment, test_text = _split_header(_API_CONS_RE.sub("", header))
    if len(cons) > 1:
        raise SpliceSyntaxError("more than one API_cons reference")
    if not cons and (test_text is None or not test_text.strip()):
        raise MissingRequirement("draft has neither a TEST section nor an API_cons reference")

    block = parse_statements(test_text or "", allow_marker=True)
    markers = _count_markers(block)
    if markers > 1:
        raise DuplicateSolutionMarker(f"{markers} __solution__ markers in TEST")

    info = check_program(prog, registry)
    core = desugar(prog)
    core_info = check_program(core, registry)
    expr_holes = [h for h, k in holes if k == "expr"]
    stmt_holes = [h for h, k in holes if k == "stmt"]
    for h in expr_holes:
        if h not in info.hole_types:
            raise AmbiguousType(f"cannot determine the type of hole {h}")

    if cons:
        aut_path = Path(cons[0])
        if not aut_path.is_absolute() and base_dir is not None:
            aut_path = Path(base_dir) / aut_path
        automaton = load_automaton(aut_path)
        driver = check_test_block(block, prog, registry, A.UNIT)
        requirement: Requirement = AutomatonRequirement(automaton, str(aut_path), driver,
                                                        markers == 1)
    else:
        expanded = check_test_block(block, prog, registry, A.BOOL)
        requirement = Tests(block, expanded, markers == 1)

    return Draft(prog, comment, requirement, expr_holes, stmt_holes,
                 [comment] + others, registry, core, core_info, path)


def load_draft(path: str | Path, registry=None) -> Draft:
    path = Path(path)
    return parse_draft(path.read_text(), registry=registry, base_dir=path.parent,
                       path=str(path))


def infer_hole_type(draft: Draft, hole_id: int) -> A.Type:
    if hole_id in draft.stmt_holes:
        raise NotAnExprHole(f"hole {hole_id} is a statement hole")
    if hole_id not in draft.expr_holes:
        raise NotAnExprHole(f"no expression hole {hole_id}")
    t = draft.info.hole_types.get(hole_id)
    if t is None:
        raise AmbiguousType(f"cannot determine the type of hole {hole_id}")
    return t


def count_hole_tokens(text: str) -> int:
    tokens, _ = tokenize(text)
    return sum(1 for t in tokens if t.kind == "hole")
