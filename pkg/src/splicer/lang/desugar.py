"""For-loop elimination and its display-only inverse."""

from __future__ import annotations

from dataclasses import replace

from . import ast as A


def desugar_stmt(s: A.Stmt) -> A.Stmt:
    t = type(s)
    if t is A.For:
        body = desugar_stmt(s.body)
        loop_body = body if s.step is None else A.Block((body, A.ExprStmt(s.step, span=s.span)),
                                                        span=s.span)
        guard = s.guard if s.guard is not None else A.BoolLit(True, span=s.span)
        loop = A.While(guard, loop_body, span=s.span)
        if s.init is None:
            return A.Block((loop,), span=s.span)
        return A.Block((s.init, loop), span=s.span)
    if t is A.Block:
        new = tuple(desugar_stmt(c) for c in s.stmts)
        return s if all(a is b for a, b in zip(new, s.stmts)) else replace(s, stmts=new)
    if t is A.If:
        then = desugar_stmt(s.then)
        orelse = desugar_stmt(s.orelse) if s.orelse is not None else None
        if then is s.then and orelse is s.orelse:
            return s
        return replace(s, then=then, orelse=orelse)
    if t is A.While:
        body = desugar_stmt(s.body)
        return s if body is s.body else replace(s, body=body)
    return s


def desugar(p: A.Program) -> A.Program:
    """Rewrite every ``for`` into ``{ init; while (guard) { body; step; } }``.

    Node ids (including hole ids) of all pre-existing nodes are preserved.
    """
    body = desugar_stmt(p.body)
    return p if body is p.body else replace(p, body=body)


def resugar_stmt(s: A.Stmt) -> A.Stmt:
    """Inverse of :func:`desugar_stmt` for display; recognizes the exact shape."""
    t = type(s)
    if t is A.Block:
        stmts = tuple(resugar_stmt(c) for c in s.stmts)
        if (len(stmts) == 2 and isinstance(stmts[0], (A.Let, A.ExprStmt))
                and isinstance(s.stmts[1], A.While)):
            loop = s.stmts[1]
            body = loop.body
            if (isinstance(body, A.Block) and len(body.stmts) == 2
                    and isinstance(body.stmts[1], A.ExprStmt)):
                return A.For(stmts[0], loop.guard, body.stmts[1].expr,
                             resugar_stmt(body.stmts[0]), span=s.span)
        return replace(s, stmts=stmts)
    if t is A.If:
        return replace(s, then=resugar_stmt(s.then),
                       orelse=resugar_stmt(s.orelse) if s.orelse is not None else None)
    if t is A.While:
        return replace(s, body=resugar_stmt(s.body))
    return s


def resugar(p: A.Program) -> A.Program:
    return replace(p, body=resugar_stmt(p.body))
