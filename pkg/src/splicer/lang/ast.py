"""Typed AST for the splice language.

Nodes are frozen dataclasses. Every node carries a process-unique ``id`` and an
optional source ``span``; both are excluded from equality so that two trees
compare structurally.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Union

_ids = itertools.count(1)


def fresh_id() -> int:
    return next(_ids)


class Span(NamedTuple):
    start: int
    end: int
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

SCALAR_KINDS = ("int", "bool", "str")


@dataclass(frozen=True, slots=True)
class Type:
    kind: str  # int | bool | str | unit | array | opaque
    elem: Optional["Type"] = None
    dims: int = 0
    name: Optional[str] = None

    def __str__(self) -> str:
        if self.kind == "array":
            return f"{self.elem}{'[]' * self.dims}"
        if self.kind == "opaque":
            return self.name or "?"
        return _SURFACE_NAMES[self.kind]

    @property
    def is_array(self) -> bool:
        return self.kind == "array"


_SURFACE_NAMES = {"int": "int", "bool": "boolean", "str": "String", "unit": "void"}

INT = Type("int")
BOOL = Type("bool")
STR = Type("str")
UNIT = Type("unit")


def array_of(elem: Type, dims: int = 1) -> Type:
    if elem.kind == "array":
        return Type("array", elem.elem, elem.dims + dims)
    return Type("array", elem, dims)


def opaque(name: str) -> Type:
    return Type("opaque", name=name)


def row_type(t: Type, nindices: int) -> Type:
    """Type obtained by indexing ``t`` with ``nindices`` subscripts."""
    left = t.dims - nindices
    return t.elem if left == 0 else Type("array", t.elem, left)


# ---------------------------------------------------------------------------
# Base node
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Node:
    id: int = field(default_factory=fresh_id, compare=False, repr=False, kw_only=True)
    span: Optional[Span] = field(default=None, compare=False, repr=False, kw_only=True)


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------

BINOPS = ("+", "-", "*", "/", "%", "==", "!=", "<", "<=", ">", ">=", "&&", "||")
UNOPS = ("-", "!", "++", "--")


@dataclass(frozen=True, slots=True)
class Var(Node):
    name: str


@dataclass(frozen=True, slots=True)
class IntLit(Node):
    value: int


@dataclass(frozen=True, slots=True)
class BoolLit(Node):
    value: bool


@dataclass(frozen=True, slots=True)
class StrLit(Node):
    value: str


@dataclass(frozen=True, slots=True)
class Binop(Node):
    op: str
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True, slots=True)
class Unop(Node):
    op: str
    operand: "Expr"
    postfix: bool = False


@dataclass(frozen=True, slots=True)
class Call(Node):
    fname: str
    args: tuple = ()


@dataclass(frozen=True, slots=True)
class Assign(Node):
    target: "Expr"
    value: "Expr"


@dataclass(frozen=True, slots=True)
class Index(Node):
    base: "Expr"
    indices: tuple = ()


@dataclass(frozen=True, slots=True)
class Length(Node):
    """``e.length`` on an array."""

    base: "Expr"


@dataclass(frozen=True, slots=True)
class NewArray(Node):
    elem: Type
    sizes: tuple = ()


@dataclass(frozen=True, slots=True)
class ArrayLit(Node):
    elems: tuple = ()


@dataclass(frozen=True, slots=True)
class ExprHole(Node):
    hole_id: int


Expr = Union[Var, IntLit, BoolLit, StrLit, Binop, Unop, Call, Assign, Index, Length,
             NewArray, ArrayLit, ExprHole]
EXPR_TYPES = (Var, IntLit, BoolLit, StrLit, Binop, Unop, Call, Assign, Index, Length,
              NewArray, ArrayLit, ExprHole)


# ---------------------------------------------------------------------------
# Statements
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Let(Node):
    name: str
    type: Type
    init: Optional[Expr] = None


@dataclass(frozen=True, slots=True)
class ExprStmt(Node):
    expr: Expr


@dataclass(frozen=True, slots=True)
class If(Node):
    guard: Expr
    then: "Stmt"
    orelse: Optional["Stmt"] = None


@dataclass(frozen=True, slots=True)
class While(Node):
    guard: Expr
    body: "Stmt"


@dataclass(frozen=True, slots=True)
class For(Node):
    init: Optional["Stmt"]
    guard: Optional[Expr]
    step: Optional[Expr]
    body: "Stmt"


@dataclass(frozen=True, slots=True)
class Block(Node):
    stmts: tuple = ()


@dataclass(frozen=True, slots=True)
class Return(Node):
    value: Optional[Expr] = None


@dataclass(frozen=True, slots=True)
class StmtHole(Node):
    hole_id: int


@dataclass(frozen=True, slots=True)
class SolutionMarker(Node):
    """``__solution__`` placeholder; only legal inside a test block."""


Stmt = Union[Let, ExprStmt, If, While, For, Block, Return, StmtHole, SolutionMarker]
STMT_TYPES = (Let, ExprStmt, If, While, For, Block, Return, StmtHole, SolutionMarker)


class Param(NamedTuple):
    name: str
    type: Type


@dataclass(frozen=True, slots=True)
class Program(Node):
    name: str
    params: tuple  # of Param
    ret: Type
    body: Block

    def signature(self) -> tuple[tuple[Type, ...], Type]:
        return tuple(p.type for p in self.params), self.ret


# ---------------------------------------------------------------------------
# Generic traversal helpers
# ---------------------------------------------------------------------------

_CHILD_FIELDS: dict[type, tuple[str, ...]] = {
    Var: (), IntLit: (), BoolLit: (), StrLit: (), ExprHole: (), StmtHole: (),
    SolutionMarker: (),
    Binop: ("lhs", "rhs"),
    Unop: ("operand",),
    Call: ("args",),
    Assign: ("target", "value"),
    Index: ("base", "indices"),
    Length: ("base",),
    NewArray: ("sizes",),
    ArrayLit: ("elems",),
    Let: ("init",),
    ExprStmt: ("expr",),
    If: ("guard", "then", "orelse"),
    While: ("guard", "body"),
    For: ("init", "guard", "step", "body"),
    Block: ("stmts",),
    Return: ("value",),
    Program: ("body",),
}


def children(node: Node):
    """Direct child nodes in source order."""
    for name in _CHILD_FIELDS[type(node)]:
        value = getattr(node, name)
        if value is None:
            continue
        if isinstance(value, tuple):
            yield from value
        else:
            yield value


def walk(node: Node):
    """Pre-order traversal."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(list(children(n))))


def node_count(node: Node) -> int:
    return sum(1 for _ in walk(node))


def is_expr(node: Node) -> bool:
    return isinstance(node, EXPR_TYPES)


def has_holes(node: Node) -> bool:
    return any(isinstance(n, (ExprHole, StmtHole)) for n in walk(node))
