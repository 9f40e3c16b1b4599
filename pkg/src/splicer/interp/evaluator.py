"""Evaluator for hole-free programs.

Programs are compiled once into nested Python closures (variables resolved to
frame slots) and can then be run any number of times. A compiled unit holds no
per-run state: each run gets its own context carrying fuel, deadline, trace and
file system, reached through slot 0 of every frame. Compiled units are
therefore safe to share between threads.

Runtime values: int, bool and str map to the Python types, arrays to (nested)
lists, API handles to :class:`OpaqueValue`, and ``null``/unit to ``None``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

from ..errors import EvalError, EvalRuntimeError, EvalTimeout, SpliceTypeError
from ..lang import ast as A
from ..lang.desugar import desugar, desugar_stmt
from .api import ApiRegistry, OpaqueValue, shared_registry
from .vfs import EMPTY_FS, VirtualFS

MAX_CALL_DEPTH = 120
MAX_ARRAY_CELLS = 1 << 22
_CHECK_EVERY = 1024


@dataclass(frozen=True)
class Limits:
    """Per-execution budget. ``step_fuel`` counts loop iterations, calls and
    allocated array cells; ``wall_clock`` is CPU seconds of the running thread."""

    step_fuel: int = 10_000_000
    wall_clock: float = 1.0


@dataclass(frozen=True)
class ApiEvent:
    fname: str
    arg_types: tuple
    receiver_type: Optional[str]
    seq: int


class _Ctx:
    __slots__ = ("fuel", "next_check", "deadline", "trace", "fs", "depth")

    def __init__(self, limits: Limits, fs: VirtualFS):
        self.fuel = limits.step_fuel
        self.next_check = self.fuel - _CHECK_EVERY
        self.deadline = time.thread_time() + limits.wall_clock
        self.trace: list[ApiEvent] = []
        self.fs = fs
        self.depth = 0

    def check(self):
        if self.fuel <= 0:
            raise EvalTimeout("step fuel exhausted")
        if time.thread_time() > self.deadline:
            raise EvalTimeout("time limit exceeded")
        self.next_check = self.fuel - _CHECK_EVERY

    def spend(self, n: int):
        self.fuel -= n
        if self.fuel <= self.next_check:
            self.check()


# ---------------------------------------------------------------------------
# Integer semantics (32-bit two's complement, truncating division)
# ---------------------------------------------------------------------------

_MIN, _MAX = -(1 << 31), (1 << 31) - 1


def wrap32(x: int) -> int:
    if _MIN <= x <= _MAX:
        return x
    return ((x + (1 << 31)) & 0xFFFFFFFF) - (1 << 31)


def _trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return -q if (a < 0) != (b < 0) else q


def int_div(a: int, b: int) -> int:
    if b == 0:
        raise EvalRuntimeError("divByZero", "division by zero")
    return wrap32(_trunc_div(a, b))


def int_rem(a: int, b: int) -> int:
    if b == 0:
        raise EvalRuntimeError("divByZero", "remainder by zero")
    return a - b * _trunc_div(a, b)


def _equal(a, b) -> bool:
    if type(a) is list or type(a) is OpaqueValue:
        return a is b
    return a == b


def _add(a, b):
    if type(a) is int:
        return wrap32(a + b)
    if a is None or b is None:
        raise EvalRuntimeError("nullRead", "string concatenation with null")
    return a + b


_BINOPS: dict[str, Callable] = {
    "+": _add,
    "-": lambda a, b: wrap32(a - b),
    "*": lambda a, b: wrap32(a * b),
    "/": int_div,
    "%": int_rem,
    "==": _equal,
    "!=": lambda a, b: not _equal(a, b),
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def default_value(t: A.Type):
    if t.kind == "int":
        return 0
    if t.kind == "bool":
        return False
    return None


def _check_index(a, i):
    if a is None:
        raise EvalRuntimeError("nullRead", "indexing null")
    if not 0 <= i < len(a):
        raise EvalRuntimeError("indexOutOfBounds", f"index {i} out of bounds for length {len(a)}")


# ---------------------------------------------------------------------------
# Compilation
# ---------------------------------------------------------------------------


@dataclass
class _Function:
    name: str
    nslots: int
    param_slots: tuple
    ret: A.Type
    body: Callable = None


class _Scope:
    def __init__(self, fn_state, parent: Optional["_Scope"] = None):
        self.vars: dict[str, int] = dict(parent.vars) if parent else {}
        self.fn = fn_state

    def declare(self, name: str) -> int:
        slot = self.fn["nslots"]
        self.fn["nslots"] += 1
        self.vars[name] = slot
        return slot

    def lookup(self, name: str, node: A.Node) -> int:
        slot = self.vars.get(name)
        if slot is None:
            raise SpliceTypeError(f"undefined variable {name!r}", node.span)
        return slot


class Compiled:
    """A set of compiled functions that can call each other and the API."""

    def __init__(self, registry: Optional[ApiRegistry] = None):
        self.registry = registry if registry is not None else shared_registry()
        self.functions: dict[str, _Function] = {}

    # -- public ------------------------------------------------------------

    def add_program(self, p: A.Program) -> None:
        p = desugar(p)
        fn_state = {"nslots": 1}
        scope = _Scope(fn_state)
        slots = tuple(scope.declare(q.name) for q in p.params)
        fn = _Function(p.name, 0, slots, p.ret)
        self.functions[p.name] = fn
        fn.body = self._block_stmts(p.body.stmts, scope)
        fn.nslots = fn_state["nslots"]

    def add_block(self, name: str, block: A.Block, ret: A.Type) -> None:
        """Compile a statement block as a parameterless function."""
        self.add_program(A.Program(name, (), ret, block))

    def call(self, name: str, args: list, fs: VirtualFS = EMPTY_FS,
             limits: Limits = Limits()):
        """Run function ``name``; returns ``(value, trace)``.

        Raises :class:`EvalError` subclasses carrying the partial trace.
        """
        ctx = _Ctx(limits, fs)
        fn = self.functions[name]
        try:
            value = self._invoke(fn, list(args), ctx)
        except EvalError as e:
            e.trace = list(ctx.trace)
            raise
        except RecursionError:
            raise EvalRuntimeError("stackOverflow", "recursion too deep", ctx.trace) from None
        return value, ctx.trace

    # -- calls -------------------------------------------------------------

    @staticmethod
    def _invoke(fn: _Function, args: list, ctx: _Ctx):
        frame = [None] * fn.nslots
        frame[0] = ctx
        for slot, v in zip(fn.param_slots, args):
            frame[slot] = v
        ctx.depth += 1
        if ctx.depth > MAX_CALL_DEPTH:
            raise EvalRuntimeError("stackOverflow", f"call depth exceeds {MAX_CALL_DEPTH}")
        try:
            r = fn.body(frame)
        finally:
            ctx.depth -= 1
        if r is not None:
            return r[0]
        if fn.ret.kind != "unit":
            raise EvalRuntimeError("missingReturn", f"{fn.name} ended without return")
        return None

    # -- statements --------------------------------------------------------

    def _block_stmts(self, stmts, scope: _Scope):
        fns = tuple(self._stmt(s, scope) for s in stmts)
        if len(fns) == 1:
            return fns[0]

        def run(f):
            for s in fns:
                r = s(f)
                if r is not None:
                    return r
            return None
        return run

    def _stmt(self, s: A.Stmt, scope: _Scope):
        tp = type(s)
        if tp is A.Block:
            return self._block_stmts(s.stmts, _Scope(scope.fn, scope))
        if tp is A.ExprStmt:
            e = self._expr(s.expr, scope)

            def run(f):
                e(f)
            return run
        if tp is A.Let:
            if s.init is None:
                slot = scope.declare(s.name)
                dv = default_value(s.type)

                def run(f):
                    f[slot] = dv
                return run
            init = self._expr(s.init, scope)
            slot = scope.declare(s.name)

            def run(f):
                f[slot] = init(f)
            return run
        if tp is A.If:
            g = self._expr(s.guard, scope)
            then = self._stmt(s.then, _Scope(scope.fn, scope))
            if s.orelse is None:
                def run(f):
                    if g(f):
                        return then(f)
                return run
            orelse = self._stmt(s.orelse, _Scope(scope.fn, scope))

            def run(f):
                if g(f):
                    return then(f)
                return orelse(f)
            return run
        if tp is A.While:
            g = self._expr(s.guard, scope)
            body = self._stmt(s.body, _Scope(scope.fn, scope))

            def run(f):
                ctx = f[0]
                while g(f):
                    ctx.fuel -= 1
                    if ctx.fuel <= ctx.next_check:
                        ctx.check()
                    r = body(f)
                    if r is not None:
                        return r
                return None
            return run
        if tp is A.For:
            return self._stmt(desugar_stmt(s), scope)
        if tp is A.Return:
            if s.value is None:
                none = (None,)

                def run(f):
                    return none
                return run
            v = self._expr(s.value, scope)

            def run(f):
                return (v(f),)
            return run
        if tp in (A.StmtHole, A.SolutionMarker):
            raise EvalError(f"cannot evaluate {tp.__name__}")
        raise EvalError(f"unknown statement {tp.__name__}")

    # -- expressions -------------------------------------------------------

    def _expr(self, e: A.Expr, scope: _Scope):
        tp = type(e)
        if tp is A.Var:
            slot = scope.lookup(e.name, e)
            return lambda f: f[slot]
        if tp is A.IntLit:
            v = wrap32(e.value)
            return lambda f: v
        if tp is A.BoolLit or tp is A.StrLit:
            v = e.value
            return lambda f: v
        if tp is A.Binop:
            lhs = self._expr(e.lhs, scope)
            rhs = self._expr(e.rhs, scope)
            if e.op == "&&":
                return lambda f: lhs(f) and rhs(f)
            if e.op == "||":
                return lambda f: lhs(f) or rhs(f)
            op = _BINOPS[e.op]
            return lambda f: op(lhs(f), rhs(f))
        if tp is A.Unop:
            return self._unop(e, scope)
        if tp is A.Assign:
            return self._assign(e, scope)
        if tp is A.Index:
            base = self._expr(e.base, scope)
            idx = tuple(self._expr(i, scope) for i in e.indices)
            if len(idx) == 1:
                i0 = idx[0]

                def ev(f):
                    a = base(f)
                    i = i0(f)
                    _check_index(a, i)
                    return a[i]
                return ev

            def ev(f):
                a = base(f)
                for ix in idx:
                    i = ix(f)
                    _check_index(a, i)
                    a = a[i]
                return a
            return ev
        if tp is A.Length:
            base = self._expr(e.base, scope)

            def ev(f):
                a = base(f)
                if a is None:
                    raise EvalRuntimeError("nullRead", ".length of null")
                return len(a)
            return ev
        if tp is A.Call:
            return self._call(e, scope)
        if tp is A.NewArray:
            sizes = tuple(self._expr(x, scope) for x in e.sizes)
            dv = default_value(e.elem)

            def ev(f):
                dims = [x(f) for x in sizes]
                cells = 1
                for d in dims:
                    if d < 0:
                        raise EvalRuntimeError("badAlloc", f"negative array size {d}")
                    cells *= max(d, 1)
                if cells > MAX_ARRAY_CELLS:
                    raise EvalRuntimeError("badAlloc", f"array of {cells} cells")
                f[0].spend(cells)
                if len(dims) == 1:
                    return [dv] * dims[0]
                return [[dv] * dims[1] for _ in range(dims[0])]
            return ev
        if tp is A.ArrayLit:
            elems = tuple(self._expr(x, scope) for x in e.elems)

            def ev(f):
                f[0].spend(len(elems))
                return [x(f) for x in elems]
            return ev
        if tp is A.ExprHole:
            raise EvalError("cannot evaluate a hole")
        raise EvalError(f"unknown expression {tp.__name__}")

    def _lvalue(self, target: A.Expr, scope: _Scope):
        """``(locate, get, put)``: Var targets use get/put, Index targets use locate."""
        if type(target) is A.Var:
            slot = scope.lookup(target.name, target)

            def get(f):
                return f[slot]

            def put(f, v):
                f[slot] = v
            return None, get, put
        base = self._expr(target.base, scope)
        idx = tuple(self._expr(i, scope) for i in target.indices)

        def locate(f):
            a = base(f)
            for ix in idx[:-1]:
                i = ix(f)
                _check_index(a, i)
                a = a[i]
            i = idx[-1](f)
            _check_index(a, i)
            return a, i
        return locate, None, None

    def _assign(self, e: A.Assign, scope: _Scope):
        val = self._expr(e.value, scope)
        if type(e.target) is A.Var:
            slot = scope.lookup(e.target.name, e.target)

            def ev(f):
                v = val(f)
                f[slot] = v
                return v
            return ev
        base = self._expr(e.target.base, scope)
        idx = tuple(self._expr(i, scope) for i in e.target.indices)

        def ev(f):
            a = base(f)
            ivals = [ix(f) for ix in idx]
            v = val(f)
            for i in ivals[:-1]:
                _check_index(a, i)
                a = a[i]
            _check_index(a, ivals[-1])
            a[ivals[-1]] = v
            return v
        return ev

    def _unop(self, e: A.Unop, scope: _Scope):
        if e.op == "!":
            x = self._expr(e.operand, scope)
            return lambda f: not x(f)
        if e.op == "-":
            x = self._expr(e.operand, scope)
            return lambda f: wrap32(-x(f))
        delta = 1 if e.op == "++" else -1
        post = e.postfix
        locate, get, put = self._lvalue(e.operand, scope)
        if locate is None:
            def ev(f):
                old = get(f)
                new = wrap32(old + delta)
                put(f, new)
                return old if post else new
            return ev

        def ev(f):
            a, i = locate(f)
            old = a[i]
            new = wrap32(old + delta)
            a[i] = new
            return old if post else new
        return ev

    def _call(self, e: A.Call, scope: _Scope):
        args = tuple(self._expr(a, scope) for a in e.args)
        api = self.registry.get(e.fname)
        functions = self.functions
        name = e.fname
        if name in functions or api is None:
            # user functions resolve at run time, so a unit may add the callee later
            invoke = self._invoke

            def ev(f):
                fn = functions.get(name)
                if fn is None:
                    raise EvalError(f"unknown function {name!r}")
                vals = [a(f) for a in args]
                ctx = f[0]
                ctx.fuel -= 1
                if ctx.fuel <= ctx.next_check:
                    ctx.check()
                return invoke(fn, vals, ctx)
            return ev
        behavior = api.behavior
        arg_types = api.signature.params
        receiver = api.signature.receiver
        opaque_args = tuple(i for i, t in enumerate(arg_types) if t.kind == "opaque")

        def ev(f):
            vals = [a(f) for a in args]
            ctx = f[0]
            ctx.fuel -= 1
            if ctx.fuel <= ctx.next_check:
                ctx.check()
            ctx.trace.append(ApiEvent(name, arg_types, receiver, len(ctx.trace)))
            for i in opaque_args:
                if vals[i] is None:
                    raise EvalRuntimeError("nullRead", f"null handle passed to {name}")
            return behavior(vals, ctx.fs)
        return ev


def evaluate(p: A.Program, args: list, fs: VirtualFS = EMPTY_FS, limits: Limits = Limits(),
             registry: Optional[ApiRegistry] = None):
    """Evaluate ``p`` on ``args``; returns ``(value, trace)``."""
    unit = Compiled(registry)
    unit.add_program(p)
    return unit.call(p.name, args, fs, limits)
