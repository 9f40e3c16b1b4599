"""Bidirectional type checker.

Besides accepting or rejecting a program, the checker records what later stages
need: the type of every expression node, the type forced on each expression
hole by its context, and the variables visible at every hole.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

from ..errors import AmbiguousType, SpliceTypeError
from . import ast as A

# A function table maps a callable name to (param types, return type).
Signature = tuple[tuple[A.Type, ...], A.Type]

_ARITH = {"-", "*", "/", "%"}
_COMPARE = {"<", "<=", ">", ">="}
_EQUALITY = {"==", "!="}
_LOGIC = {"&&", "||"}


@dataclass
class TypeInfo:
    expr_types: dict[int, A.Type] = field(default_factory=dict)
    # hole_id -> type forced by context (expression holes only)
    hole_types: dict[int, A.Type] = field(default_factory=dict)
    # hole_id -> visible variables, in declaration order
    hole_scopes: dict[int, tuple[tuple[str, A.Type], ...]] = field(default_factory=dict)
    # SolutionMarker node id -> visible variables
    marker_scopes: dict[int, tuple[tuple[str, A.Type], ...]] = field(default_factory=dict)


class _Scope:
    """Insertion-ordered variable map; redeclaring a name moves it to the end."""

    def __init__(self, items=()):
        self.vars: dict[str, A.Type] = dict(items)

    def declare(self, name: str, t: A.Type) -> None:
        self.vars.pop(name, None)
        self.vars[name] = t

    def snapshot(self) -> tuple[tuple[str, A.Type], ...]:
        return tuple(self.vars.items())


class Checker:
    def __init__(self, functions: Mapping[str, Signature], known_type: Callable[[A.Type], bool],
                 ret: A.Type, on_marker: Optional[Callable] = None):
        self.functions = functions
        self.known_type = known_type
        self.ret = ret
        self.info = TypeInfo()
        self.scope = _Scope()
        self.on_marker = on_marker

    # -- helpers -----------------------------------------------------------

    def fail(self, msg: str, node: A.Node, expected=None, actual=None):
        raise SpliceTypeError(msg, node.span, expected, actual)

    def check_decl_type(self, t: A.Type, node: A.Node) -> None:
        if t.kind == "array":
            if t.dims not in (1, 2):
                self.fail("arrays must have one or two dimensions", node)
            if t.elem.kind == "unit":
                self.fail("void arrays are not allowed", node)
        if not self.known_type(t):
            self.fail(f"unknown type {t}", node)

    def expect_eq(self, node: A.Node, expected: Optional[A.Type], actual: A.Type) -> A.Type:
        if expected is not None and actual != expected:
            self.fail("type mismatch", node, expected, actual)
        return actual

    # -- expressions -------------------------------------------------------

    def expr(self, e: A.Expr, expected: Optional[A.Type] = None) -> A.Type:
        t = self._expr(e, expected)
        self.info.expr_types[e.id] = t
        return t

    def _synth_or_none(self, e: A.Expr) -> Optional[A.Type]:
        return None if isinstance(e, A.ExprHole) else self.expr(e)

    def _hole(self, e: A.ExprHole, expected: Optional[A.Type]) -> A.Type:
        if expected is None:
            raise AmbiguousType("context does not determine the type of this hole", e.span)
        if expected.kind == "unit":
            raise SpliceTypeError("a hole cannot have type void", e.span)
        self.info.hole_types[e.hole_id] = expected
        self.info.hole_scopes[e.hole_id] = self.scope.snapshot()
        return expected

    def _same_type_pair(self, e: A.Binop, expected_hint: Optional[A.Type]) -> A.Type:
        """Type both operands with one common type, synthesized from whichever side can."""
        lt = self._synth_or_none(e.lhs)
        rt = self._synth_or_none(e.rhs)
        t = lt or rt or expected_hint
        if t is None:
            raise AmbiguousType("operands of this comparison are both holes", e.span)
        for side, st in ((e.lhs, lt), (e.rhs, rt)):
            if st is None:
                self.expr(side, t)
            elif st != t:
                self.fail(f"operands of {e.op} differ", e, t, st)
        return t

    def _expr(self, e: A.Expr, expected: Optional[A.Type]) -> A.Type:
        tp = type(e)
        if tp is A.ExprHole:
            return self._hole(e, expected)
        if tp is A.Var:
            t = self.scope.vars.get(e.name)
            if t is None:
                self.fail(f"undefined variable {e.name!r}", e)
            return self.expect_eq(e, expected, t)
        if tp is A.IntLit:
            return self.expect_eq(e, expected, A.INT)
        if tp is A.BoolLit:
            return self.expect_eq(e, expected, A.BOOL)
        if tp is A.StrLit:
            return self.expect_eq(e, expected, A.STR)
        if tp is A.Binop:
            op = e.op
            if op in _ARITH:
                self.expr(e.lhs, A.INT)
                self.expr(e.rhs, A.INT)
                return self.expect_eq(e, expected, A.INT)
            if op == "+":
                hint = expected if expected in (A.INT, A.STR) else A.INT
                t = self._same_type_pair(e, hint)
                if t not in (A.INT, A.STR):
                    self.fail("+ needs int or String operands", e, A.INT, t)
                return self.expect_eq(e, expected, t)
            if op in _COMPARE:
                self.expr(e.lhs, A.INT)
                self.expr(e.rhs, A.INT)
                return self.expect_eq(e, expected, A.BOOL)
            if op in _EQUALITY:
                t = self._same_type_pair(e, None)
                if t.kind == "unit":
                    self.fail("cannot compare void values", e)
                return self.expect_eq(e, expected, A.BOOL)
            if op in _LOGIC:
                self.expr(e.lhs, A.BOOL)
                self.expr(e.rhs, A.BOOL)
                return self.expect_eq(e, expected, A.BOOL)
            self.fail(f"unknown operator {op}", e)
        if tp is A.Unop:
            if e.op == "!":
                self.expr(e.operand, A.BOOL)
                return self.expect_eq(e, expected, A.BOOL)
            self.expr(e.operand, A.INT)
            return self.expect_eq(e, expected, A.INT)
        if tp is A.Call:
            sig = self.functions.get(e.fname)
            if sig is None:
                self.fail(f"unknown function {e.fname!r}", e)
            params, ret = sig
            if len(params) != len(e.args):
                self.fail(f"{e.fname} takes {len(params)} arguments", e, len(params), len(e.args))
            for arg, pt in zip(e.args, params):
                self.expr(arg, pt)
            if expected is not None and ret.kind == "unit":
                self.fail(f"{e.fname} returns no value", e, expected, ret)
            return self.expect_eq(e, expected, ret)
        if tp is A.Assign:
            if isinstance(e.target, A.ExprHole):
                vt = self._synth_or_none(e.value)
                t = vt or expected
                self.expr(e.target, t)
                if vt is None:
                    self.expr(e.value, t)
            else:
                t = self.expr(e.target)
                self.expr(e.value, t)
            return self.expect_eq(e, expected, t)
        if tp is A.Index:
            if isinstance(e.base, A.ExprHole):
                raise AmbiguousType("context does not determine the type of this hole",
                                    e.base.span)
            bt = self.expr(e.base)
            if bt.kind != "array" or bt.dims < len(e.indices):
                self.fail("indexing a non-array", e, "array", bt)
            for i in e.indices:
                self.expr(i, A.INT)
            return self.expect_eq(e, expected, A.row_type(bt, len(e.indices)))
        if tp is A.Length:
            if isinstance(e.base, A.ExprHole):
                raise AmbiguousType("context does not determine the type of this hole",
                                    e.base.span)
            bt = self.expr(e.base)
            if bt.kind != "array":
                self.fail(".length of a non-array", e, "array", bt)
            return self.expect_eq(e, expected, A.INT)
        if tp is A.NewArray:
            t = A.array_of(e.elem, len(e.sizes))
            self.check_decl_type(t, e)
            for s in e.sizes:
                self.expr(s, A.INT)
            return self.expect_eq(e, expected, t)
        if tp is A.ArrayLit:
            if expected is None or expected.kind != "array":
                self.fail("array literal needs a declared array type", e, expected, "array")
            row = A.row_type(expected, 1)
            for x in e.elems:
                self.expr(x, row)
            return expected
        self.fail(f"not an expression: {tp.__name__}", e)

    # -- statements --------------------------------------------------------

    def stmt(self, s: A.Stmt) -> None:
        tp = type(s)
        if tp is A.Let:
            self.check_decl_type(s.type, s)
            if s.type.kind == "unit":
                self.fail("cannot declare a void variable", s)
            if s.init is not None:
                self.expr(s.init, s.type)
            self.scope.declare(s.name, s.type)
        elif tp is A.ExprStmt:
            self.expr(s.expr)
        elif tp is A.If:
            self.expr(s.guard, A.BOOL)
            self.nested(s.then)
            if s.orelse is not None:
                self.nested(s.orelse)
        elif tp is A.While:
            self.expr(s.guard, A.BOOL)
            self.nested(s.body)
        elif tp is A.For:
            saved = self.scope
            self.scope = _Scope(saved.vars)
            try:
                if s.init is not None:
                    self.stmt(s.init)
                if s.guard is not None:
                    self.expr(s.guard, A.BOOL)
                if s.step is not None:
                    self.expr(s.step)
                self.nested(s.body)
            finally:
                self.scope = saved
        elif tp is A.Block:
            saved = self.scope
            self.scope = _Scope(saved.vars)
            try:
                for c in s.stmts:
                    self.stmt(c)
            finally:
                self.scope = saved
        elif tp is A.Return:
            if s.value is None:
                if self.ret.kind != "unit":
                    self.fail("missing return value", s, self.ret, A.UNIT)
            else:
                if self.ret.kind == "unit":
                    self.fail("void function returns a value", s, A.UNIT, "value")
                self.expr(s.value, self.ret)
        elif tp is A.StmtHole:
            self.info.hole_scopes[s.hole_id] = self.scope.snapshot()
        elif tp is A.SolutionMarker:
            self.info.marker_scopes[s.id] = self.scope.snapshot()
            if self.on_marker is not None:
                for name, t in self.on_marker(self.scope.snapshot()):
                    self.scope.declare(name, t)
        else:
            self.fail(f"not a statement: {tp.__name__}", s)

    def nested(self, s: A.Stmt) -> None:
        saved = self.scope
        self.scope = _Scope(saved.vars)
        try:
            self.stmt(s)
        finally:
            self.scope = saved


def function_table(registry, *programs: A.Program) -> dict[str, Signature]:
    """Callable names: the registered API plus the given programs."""
    table: dict[str, Signature] = {
        name: (f.signature.params, f.signature.ret) for name, f in registry.functions.items()
    }
    for p in programs:
        table[p.name] = p.signature()
    return table


def check_program(p: A.Program, registry=None) -> TypeInfo:
    """Type-check ``p`` (holes allowed) against the API ``registry``."""
    if registry is None:
        from ..interp.api import shared_registry
        registry = shared_registry()
    checker = Checker(function_table(registry, p), registry.type_known, p.ret)
    checker.scope = _Scope()
    for q in p.params:
        checker.check_decl_type(q.type, p)
        if q.type.kind == "unit":
            checker.fail("void parameter", p)
        checker.scope.declare(q.name, q.type)
    for s in p.body.stmts:
        checker.stmt(s)
    return checker.info


def check_block(block: A.Block, registry, functions: Mapping[str, Signature], ret: A.Type,
                *, on_marker=None, scope=()) -> TypeInfo:
    """Type-check a free-standing statement block (e.g. a test block)."""
    checker = Checker(functions, registry.type_known, ret, on_marker)
    checker.scope = _Scope(scope)
    for s in block.stmts:
        checker.stmt(s)
    return checker.info


def typechecks(p: A.Program, registry=None) -> bool:
    try:
        check_program(p, registry)
    except SpliceTypeError:
        return False
    return True
