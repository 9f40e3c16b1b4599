"""Codelets: typed, role-annotated expressions and statement windows taken
from a donor function."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

from .lang import ast as A
from .lang.desugar import desugar
from .lang.typecheck import TypeInfo, check_program


class Role(NamedTuple):
    """Syntactic position of an expression, named after its parent."""

    kind: str
    arg: Optional[object] = None

    def __str__(self) -> str:
        return self.kind if self.arg is None else f"{self.kind}({self.arg})"


ASSIGN_RHS = Role("AssignRhs")
ASSIGN_TARGET = Role("AssignTarget")
LET_INIT = Role("LetInit")
IF_GUARD = Role("IfGuard")
WHILE_GUARD = Role("WhileGuard")
INDEX_POS = Role("IndexPos")
INDEX_BASE = Role("IndexBase")
UNOP_OPERAND = Role("UnopOperand")
RETURN_VALUE = Role("ReturnValue")
EXPR_STMT = Role("ExprStmt")
LENGTH_BASE = Role("LengthBase")
NEW_ARRAY_SIZE = Role("NewArraySize")
ARRAY_ELEM = Role("ArrayElem")


def call_arg(pos: int) -> Role:
    return Role("CallArg", pos)


def binop_operand(side: str) -> Role:
    return Role("BinopOperand", side)


def child_roles(node: A.Node):
    """``(child expression, role)`` pairs of ``node`` in source order."""
    tp = type(node)
    if tp is A.Assign:
        yield node.target, ASSIGN_TARGET
        yield node.value, ASSIGN_RHS
    elif tp is A.Binop:
        yield node.lhs, binop_operand("lhs")
        yield node.rhs, binop_operand("rhs")
    elif tp is A.Unop:
        yield node.operand, UNOP_OPERAND
    elif tp is A.Call:
        for i, a in enumerate(node.args):
            yield a, call_arg(i)
    elif tp is A.Index:
        yield node.base, INDEX_BASE
        for i in node.indices:
            yield i, INDEX_POS
    elif tp is A.Length:
        yield node.base, LENGTH_BASE
    elif tp is A.NewArray:
        for s in node.sizes:
            yield s, NEW_ARRAY_SIZE
    elif tp is A.ArrayLit:
        for x in node.elems:
            yield x, ARRAY_ELEM
    elif tp is A.Let:
        if node.init is not None:
            yield node.init, LET_INIT
    elif tp is A.ExprStmt:
        yield node.expr, EXPR_STMT
    elif tp is A.If:
        yield node.guard, IF_GUARD
    elif tp is A.While:
        yield node.guard, WHILE_GUARD
    elif tp is A.Return:
        if node.value is not None:
            yield node.value, RETURN_VALUE


def expression_sites(root: A.Node):
    """Every expression under ``root`` as ``(expr, role, preorder position)``."""
    out = []
    counter = 0

    def visit(n: A.Node, role: Optional[Role]):
        nonlocal counter
        pos = counter
        counter += 1
        if role is not None:
            out.append((n, role, pos))
        roles = dict((id(c), r) for c, r in child_roles(n))
        for c in A.children(n):
            visit(c, roles.get(id(c)))

    visit(root, None)
    return out


def hole_roles(program: A.Program) -> dict[int, Role]:
    """Role of every expression hole of a (desugared) draft program."""
    return {e.hole_id: role for e, role, _ in expression_sites(program.body)
            if isinstance(e, A.ExprHole)}


# ---------------------------------------------------------------------------
# Free variables
# ---------------------------------------------------------------------------


def _expr_free(e: A.Expr, bound: set, types: dict, out: dict) -> None:
    for n in A.walk(e):
        if type(n) is A.Var and n.name not in bound and n.name not in out:
            out[n.name] = types.get(n.id)


def _stmt_free(s: A.Stmt, bound: set, types: dict, out: dict, declared: dict) -> None:
    tp = type(s)
    if tp is A.Let:
        if s.init is not None:
            _expr_free(s.init, bound, types, out)
        bound.add(s.name)
        declared.setdefault(s.name, s.type)
    elif tp is A.ExprStmt:
        _expr_free(s.expr, bound, types, out)
    elif tp is A.Return:
        if s.value is not None:
            _expr_free(s.value, bound, types, out)
    elif tp is A.If:
        _expr_free(s.guard, bound, types, out)
        _stmt_free(s.then, set(bound), types, out, declared)
        if s.orelse is not None:
            _stmt_free(s.orelse, set(bound), types, out, declared)
    elif tp is A.While:
        _expr_free(s.guard, bound, types, out)
        _stmt_free(s.body, set(bound), types, out, declared)
    elif tp is A.For:
        inner = set(bound)
        if s.init is not None:
            _stmt_free(s.init, inner, types, out, declared)
        if s.guard is not None:
            _expr_free(s.guard, inner, types, out)
        if s.step is not None:
            _expr_free(s.step, inner, types, out)
        _stmt_free(s.body, inner, types, out, declared)
    elif tp is A.Block:
        inner = set(bound)
        for c in s.stmts:
            _stmt_free(c, inner, types, out, declared)


def free_vars_expr(e: A.Expr, types: dict) -> tuple:
    out: dict = {}
    _expr_free(e, set(), types, out)
    return tuple(out.items())


def free_vars_stmts(stmts, types: dict):
    """``(free, declared)``: variables used before any declaration inside the
    window (respecting block scope), and names the window declares."""
    out: dict = {}
    declared: dict = {}
    bound: set = set()
    for s in stmts:
        _stmt_free(s, bound, types, out, declared)
    return tuple(out.items()), tuple(declared.items())


def called_functions(node: A.Node) -> frozenset:
    return frozenset(n.fname for n in A.walk(node) if type(n) is A.Call)


# ---------------------------------------------------------------------------
# Codelets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExprCodelet:
    expr: A.Expr
    type: A.Type
    role: Role
    size: int
    origin: tuple  # (source id, preorder position of the node)
    position: int = 0
    free_vars: tuple = ()  # ((name, donor type), ...) in first-occurrence order
    calls: frozenset = frozenset()

    kind = "expr"


@dataclass(frozen=True)
class StmtCodelet:
    stmts: tuple
    size: int
    origin: tuple  # (source id, preorder position of the block, first index, last index)
    depth: int = 0
    position: tuple = (0, 0)  # (preorder position of the block, index in it)
    free_vars: tuple = ()
    declared: tuple = ()
    calls: frozenset = frozenset()

    kind = "stmt"

    def __len__(self) -> int:
        return len(self.stmts)


@dataclass
class Donor:
    """A corpus function prepared for codelet extraction."""

    source_id: int
    program: A.Program  # desugared
    info: TypeInfo = field(repr=False, default=None)

    @classmethod
    def prepare(cls, program: A.Program, source_id: int = 0, registry=None) -> "Donor":
        core = desugar(program)
        return cls(source_id, core, check_program(core, registry))


def _donor(p, source_id: int, registry) -> Donor:
    return p if isinstance(p, Donor) else Donor.prepare(p, source_id, registry)


def extract_expr_codelets(p, source_id: int = 0, registry=None) -> list[ExprCodelet]:
    """Every expression node of ``p`` as a codelet, smallest first."""
    d = _donor(p, source_id, registry)
    types = d.info.expr_types
    out = []
    for e, role, pos in expression_sites(d.program.body):
        out.append(ExprCodelet(e, types[e.id], role, A.node_count(e), (d.source_id, pos), pos,
                               free_vars_expr(e, types), called_functions(e)))
    out.sort(key=lambda c: (c.size, c.position))
    return out


def _blocks(root: A.Node):
    """``(block, depth, preorder position)`` of every Block under ``root``."""
    out = []
    counter = 0

    def visit(n, depth):
        nonlocal counter
        pos = counter
        counter += 1
        if type(n) is A.Block:
            out.append((n, depth, pos))
            depth += 1
        for c in A.children(n):
            visit(c, depth)

    visit(root, 0)
    return out


def extract_stmt_codelets(p, max_len: int = 8, source_id: int = 0,
                          registry=None) -> list[StmtCodelet]:
    """All contiguous windows of 1..max_len statements of every Block."""
    d = _donor(p, source_id, registry)
    types = d.info.expr_types
    out = []
    for block, depth, pos in _blocks(d.program.body):
        stmts = block.stmts
        n = len(stmts)
        for length in range(1, min(max_len, n) + 1):
            for i in range(n - length + 1):
                w = stmts[i:i + length]
                free, declared = free_vars_stmts(w, types)
                calls = frozenset().union(*(called_functions(s) for s in w))
                out.append(StmtCodelet(w, sum(A.node_count(s) for s in w),
                                       (d.source_id, pos, i, i + length - 1), depth, (pos, i),
                                       free, declared, calls))
    out.sort(key=lambda c: (c.size, c.depth, c.position, len(c.stmts)))
    return out


# ---------------------------------------------------------------------------
# Constant adaptation
# ---------------------------------------------------------------------------


def draft_int_literals(program: A.Program) -> list[int]:
    seen: dict[int, None] = {}
    for n in A.walk(program.body):
        if type(n) is A.IntLit:
            seen.setdefault(n.value)
    return list(seen)


def _replace_node(root, target_id: int, new):
    """Copy of ``root`` with the node whose id is ``target_id`` replaced."""
    if root.id == target_id:
        return new
    changes = {}
    for name in A._CHILD_FIELDS[type(root)]:
        value = getattr(root, name)
        if value is None:
            continue
        if isinstance(value, tuple):
            items = tuple(_replace_node(v, target_id, new) for v in value)
            if any(a is not b for a, b in zip(items, value)):
                changes[name] = items
        else:
            v2 = _replace_node(value, target_id, new)
            if v2 is not value:
                changes[name] = v2
    return replace(root, **changes) if changes else root


def adapt_constants(c, draft_literals, scope_ints=(), budget: int = 32) -> list:
    """``c`` followed by variants with one integer literal replaced by a draft
    literal or an in-scope int variable; at most ``budget`` codelets in total."""
    roots = (c.expr,) if isinstance(c, ExprCodelet) else c.stmts
    literals = [n for r in roots for n in A.walk(r) if type(n) is A.IntLit]
    declared = dict(c.declared) if isinstance(c, StmtCodelet) else {}
    repl = [A.IntLit(v) for v in draft_literals] + \
        [A.Var(name) for name in scope_ints if name not in declared]
    out = [c]
    for lit in literals:
        for r in repl:
            if len(out) >= budget:
                return out
            free = c.free_vars
            if type(r) is A.Var and r.name not in dict(free):
                free = free + ((r.name, A.INT),)
            if isinstance(c, ExprCodelet):
                e = _replace_node(c.expr, lit.id, r)
                out.append(replace(c, expr=e, size=A.node_count(e), free_vars=free))
            else:
                stmts = tuple(_replace_node(s, lit.id, r) for s in c.stmts)
                out.append(replace(c, stmts=stmts, size=sum(A.node_count(s) for s in stmts),
                                   free_vars=free))
    return out
