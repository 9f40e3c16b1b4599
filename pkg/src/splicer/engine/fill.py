"""Hole filling: which codelets may go into which hole, and the enumeration of
complete hole assignments."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterator, Optional

from ..codelet import (Donor, ExprCodelet, Role, StmtCodelet, adapt_constants, draft_int_literals,
                       extract_expr_codelets, extract_stmt_codelets, hole_roles)
from ..errors import KindMismatch
from ..lang import ast as A
from ..lang.desugar import resugar_stmt
from ..lang.draft import Draft
from ..lang.printer import expr_to_str, stmt_to_str
from .config import SpliceConfig


@dataclass(frozen=True)
class HoleSpec:
    hole_id: int
    kind: str  # "expr" | "stmt"
    type: Optional[A.Type]  # expression holes only
    role: Optional[Role]  # expression holes only
    scope: tuple  # ((name, type), ...) visible at the hole, in declaration order

    def scope_type(self, name: str) -> Optional[A.Type]:
        for n, t in self.scope:
            if n == name:
                return t
        return None


def hole_specs(draft: Draft) -> list[HoleSpec]:
    """One spec per hole, in source order."""
    roles = hole_roles(draft.core)
    out = []
    for h in draft.holes:
        kind = draft.hole_kind(h)
        out.append(HoleSpec(h, kind, draft.info.hole_types.get(h) if kind == "expr" else None,
                            roles.get(h), draft.info.hole_scopes.get(h, ())))
    return out


def allowed_calls(draft: Draft) -> frozenset:
    return frozenset(draft.registry.functions) | {draft.program.name}


def _declared(c) -> dict:
    return dict(c.declared) if isinstance(c, StmtCodelet) else {}


def has_target(spec: HoleSpec, c, name: str, t: A.Type, type_matching: bool) -> bool:
    declared = _declared(c)
    return any(n not in declared and (not type_matching or st == t) for n, st in spec.scope)


def valid(draft: Draft, spec: HoleSpec, c, cfg: SpliceConfig,
          calls: Optional[frozenset] = None) -> bool:
    """May codelet ``c`` fill the hole described by ``spec``?"""
    if c.kind != spec.kind:
        raise KindMismatch(f"{c.kind} codelet for {spec.kind} hole {spec.hole_id}")
    if not c.calls <= (allowed_calls(draft) if calls is None else calls):
        return False
    if spec.kind == "expr":
        if cfg.type_matching and c.type != spec.type:
            return False
        if cfg.role_matching and c.role != spec.role:
            return False
    for name, t in c.free_vars:
        if spec.scope_type(name) == t:
            continue
        if not has_target(spec, c, name, t, cfg.type_matching):
            return False
    return True


def codelet_key(c) -> tuple:
    """Identity of a codelet for de-duplication: its text, type and free variables."""
    if isinstance(c, ExprCodelet):
        return ("expr", expr_to_str(c.expr), c.type, c.free_vars)
    return ("stmt", tuple(stmt_to_str(s) for s in c.stmts), c.free_vars)


@dataclass
class DonorCodelets:
    source_id: int
    exprs: list
    stmts: list

    @classmethod
    def extract(cls, donor: Donor, max_window: int = 8) -> "DonorCodelets":
        return cls(donor.source_id, extract_expr_codelets(donor),
                   extract_stmt_codelets(donor, max_window))


def hole_choices(draft: Draft, spec: HoleSpec, codelets: DonorCodelets,
                 cfg: SpliceConfig) -> list:
    """Valid codelets for one hole, smallest first, without duplicates."""
    pool = codelets.exprs if spec.kind == "expr" else codelets.stmts
    calls = allowed_calls(draft)
    literals = draft_int_literals(draft.program) if cfg.constant_adaptation else ()
    scope_ints = [n for n, t in spec.scope if t == A.INT]
    out, seen = [], set()
    for c in pool:
        variants = (adapt_constants(c, literals, scope_ints, cfg.constant_budget)
                    if cfg.constant_adaptation else (c,))
        for v in variants:
            if not valid(draft, spec, v, cfg, calls):
                continue
            key = codelet_key(v)
            if key not in seen:
                seen.add(key)
                out.append(v)
    return out


# ---------------------------------------------------------------------------
# Candidates
# ---------------------------------------------------------------------------


@dataclass
class Candidate:
    """A complete hole assignment; references may still be undefined."""

    draft: Draft = field(repr=False)
    donor: int
    specs: tuple = field(repr=False)
    fills: tuple  # one codelet per spec

    @property
    def substitutions(self) -> dict:
        return {s.hole_id: c.origin for s, c in zip(self.specs, self.fills)}

    @cached_property
    def program(self) -> A.Program:
        return instantiate(self.draft.program, self.specs,
                           [fill_nodes(c) for c in self.fills])


def fill_nodes(c):
    """Surface nodes for a codelet: an expression, or a tuple of statements."""
    if isinstance(c, ExprCodelet):
        return c.expr
    if len(c.stmts) == 2:
        # a window holding exactly a desugared loop's init and while
        loop = resugar_stmt(A.Block(c.stmts))
        if type(loop) is A.For:
            return (loop,)
    return tuple(resugar_stmt(s) for s in c.stmts)


def instantiate(program: A.Program, specs, nodes) -> A.Program:
    """``program`` with every hole replaced; ``nodes[i]`` fills ``specs[i]``."""
    by_hole = {s.hole_id: n for s, n in zip(specs, nodes)}
    if not by_hole:
        return program
    return _subst(program, by_hole)


def _subst(node: A.Node, by_hole: dict):
    tp = type(node)
    if tp is A.ExprHole:
        return by_hole[node.hole_id]
    if tp is A.StmtHole:
        return A.Block(by_hole[node.hole_id], span=node.span)
    if tp is A.Block:
        stmts = []
        for s in node.stmts:
            if type(s) is A.StmtHole:
                stmts.extend(by_hole[s.hole_id])
            else:
                stmts.append(_subst(s, by_hole))
        return replace(node, stmts=tuple(stmts))
    changes = {}
    for name in A._CHILD_FIELDS[tp]:
        value = getattr(node, name)
        if value is None:
            continue
        if isinstance(value, tuple):
            changes[name] = tuple(_subst(v, by_hole) for v in value)
        else:
            changes[name] = _subst(value, by_hole)
    return replace(node, **changes) if changes else node


def fill(draft: Draft, donor, cfg: SpliceConfig, codelets: Optional[DonorCodelets] = None,
         specs: Optional[list] = None) -> Iterator[Candidate]:
    """Every complete assignment of valid codelets to the draft's holes.

    Depth-first over holes in source order, each hole trying its codelets
    smallest first; a hole-free draft yields the draft itself once.
    """
    specs = hole_specs(draft) if specs is None else specs
    if not specs:
        yield Candidate(draft, getattr(donor, "source_id", -1), (), ())
        return
    if codelets is None:
        if not isinstance(donor, Donor):
            donor = Donor.prepare(donor, registry=draft.registry)
        codelets = DonorCodelets.extract(donor, cfg.max_window)
    choices = [hole_choices(draft, s, codelets, cfg) for s in specs]
    for combo in itertools.product(*choices):
        yield Candidate(draft, codelets.source_id, tuple(specs), combo)
