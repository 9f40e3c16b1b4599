"""Brute-force synthesis: every codelet assignment times every type-respecting
renaming, filtered by type checking, the requirement and the dead-return rule.

Shares only codelet extraction, type checking and the interpreter with the
engine; hole filling, renaming and search order are written out directly.
"""

from __future__ import annotations

import itertools
from dataclasses import replace

from splicer.codelet import Donor, extract_expr_codelets, extract_stmt_codelets
from splicer.errors import SpliceError
from splicer.interp import Limits, satisfies
from splicer.interp.vfs import EMPTY_FS
from splicer.lang import ast as A
from splicer.lang import desugar, pretty_print
from splicer.lang.typecheck import check_program


def normal_form(program: A.Program) -> str:
    """Printed desugared program with directly nested blocks flattened."""

    def flat(node):
        if type(node) is A.Block:
            out = []
            for s in node.stmts:
                s = flat(s)
                out.extend(s.stmts if type(s) is A.Block else [s])
            return A.Block(tuple(out))
        changes = {}
        for f in A._CHILD_FIELDS[type(node)]:
            v = getattr(node, f)
            if v is None or A.is_expr(v):
                continue
            changes[f] = flat(v)
        return replace(node, **changes) if changes else node

    p = desugar(program)
    return pretty_print(replace(p, body=flat(p.body)))


def _var_order(nodes):
    seen = []
    for root in nodes:
        for n in A.walk(root):
            if type(n) is A.Var and n.name not in seen:
                seen.append(n.name)
    return seen


def _declared(nodes):
    return {n.name: n.type for root in nodes for n in A.walk(root) if type(n) is A.Let}


def _donor_types(program: A.Program) -> dict:
    types = {p.name: p.type for p in program.params}
    types.update(_declared([program.body]))
    return types


def _rename(node, mapping):
    if type(node) is A.Var:
        return replace(node, name=mapping[node.name]) if node.name in mapping else node
    changes = {}
    for f in A._CHILD_FIELDS[type(node)]:
        v = getattr(node, f)
        if v is None:
            continue
        changes[f] = tuple(_rename(x, mapping) for x in v) if isinstance(v, tuple) else _rename(v, mapping)
    return replace(node, **changes) if changes else node


def _fill(node, fills):
    tp = type(node)
    if tp is A.ExprHole:
        return fills[node.hole_id]
    if tp is A.Block:
        out = []
        for s in node.stmts:
            if type(s) is A.StmtHole:
                out.extend(fills[s.hole_id])
            else:
                out.append(_fill(s, fills))
        return A.Block(tuple(out))
    if tp is A.StmtHole:
        return A.Block(tuple(fills[node.hole_id]))
    changes = {}
    for f in A._CHILD_FIELDS[tp]:
        v = getattr(node, f)
        if v is None:
            continue
        changes[f] = tuple(_fill(x, fills) for x in v) if isinstance(v, tuple) else _fill(v, fills)
    return replace(node, **changes) if changes else node


def _dead_return(program) -> bool:
    return any(type(s) is A.Return for n in A.walk(program.body) if type(n) is A.Block
               for s in n.stmts[:-1])


def brute_force(draft, donor_programs, fs=EMPTY_FS, limits=Limits(), max_window=8) -> set:
    """Normal forms of every solution: per codelet assignment, the first
    passing renaming (references by first occurrence, targets by declaration)."""
    holes = list(draft.holes)
    kinds = [draft.hole_kind(h) for h in holes]
    scopes = [dict(draft.info.hole_scopes.get(h, ())) for h in holes]
    order = [list(draft.info.hole_scopes.get(h, ())) for h in holes]
    out = set()
    for prog in donor_programs:
        donor = Donor.prepare(prog, 0, draft.registry)
        dtypes = _donor_types(donor.program)
        exprs = [c.expr for c in extract_expr_codelets(donor)]
        windows = [c.stmts for c in extract_stmt_codelets(donor, max_window)]
        pools = [[(e,) for e in exprs] if k == "expr" else windows for k in kinds]
        for combo in itertools.product(*pools):
            refs, where = [], {}
            for i, nodes in enumerate(combo):
                declared = _declared(nodes)
                for name in _var_order(nodes):
                    if name in declared:
                        continue
                    t = dtypes[name]
                    if scopes[i].get(name) == t:
                        continue
                    if (name, t) not in where:
                        refs.append((name, t))
                        where[(name, t)] = []
                    where[(name, t)].append(i)
            targets = []
            for name, t in refs:
                hs = where[(name, t)]
                targets.append([v for v, vt in order[hs[0]] if vt == t and all(
                    scopes[i].get(v) == t and v not in _declared(combo[i]) for i in hs)])
            for choice in itertools.product(*targets):
                per_hole = [{} for _ in holes]
                for (name, t), target in zip(refs, choice):
                    for i in where[(name, t)]:
                        per_hole[i][name] = target
                fills = {}
                for h, k, nodes, m in zip(holes, kinds, combo, per_hole):
                    renamed = [_rename(n, m) for n in nodes]
                    fills[h] = renamed[0] if k == "expr" else renamed
                program = _fill(draft.program, fills)
                try:
                    check_program(program, draft.registry)
                except SpliceError:
                    continue
                if not satisfies(program, draft.requirement, fs, limits, draft.registry):
                    continue
                if not _dead_return(program):
                    out.add(normal_form(program))
                break
    return out
