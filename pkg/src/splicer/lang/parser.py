"""Recursive-descent parser for the Java-like concrete syntax."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import SpliceSyntaxError
from . import ast as A
from .lexer import Comment, Token, tokenize

_ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%="}
_TYPE_KWS = {"int": A.INT, "boolean": A.BOOL, "String": A.STR, "void": A.UNIT}
_EXPR_CONTINUATIONS = _ASSIGN_OPS | {
    "||", "&&", "==", "!=", "<", "<=", ">", ">=", "+", "-", "*", "/", "%", "[", ".", "++", "--",
}
_BINARY_LEVELS = (
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
)


@dataclass
class FunctionSource:
    """A parsed function together with where it came from."""

    program: A.Program
    start: int
    end: int
    comments: list[str] = field(default_factory=list)


def _continues_expr(t: Token) -> bool:
    return t.kind == "op" and t.text in _EXPR_CONTINUATIONS


class Parser:
    def __init__(self, tokens: list[Token], *, allow_marker: bool = False):
        self.toks = tokens
        self.pos = 0
        self.allow_marker = allow_marker
        # (hole_id, "expr" | "stmt") in source order
        self.holes: list[tuple[int, str]] = []

    # -- token helpers -----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.text == text and t.kind in ("op", "kw")

    def advance(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def error(self, msg: str):
        raise SpliceSyntaxError(msg, self.tok.span)

    def span_from(self, start: Token) -> A.Span:
        last = self.toks[self.pos - 1] if self.pos > 0 else start
        return A.Span(start.span.start, last.span.end, start.span.line, start.span.col)

    def new_hole(self, kind: str) -> int:
        hid = len(self.holes)
        self.holes.append((hid, kind))
        return hid

    # -- types -------------------------------------------------------------

    def at_type_start(self) -> bool:
        t = self.tok
        if t.kind == "kw" and t.text in _TYPE_KWS:
            return True
        if t.kind == "ident":
            nxt = self.peek()
            if nxt.kind == "ident":
                return True
            if nxt.text == "[" and self.peek(2).text == "]":
                return True
        return False

    def parse_type(self) -> A.Type:
        t = self.advance()
        if t.kind == "kw" and t.text in _TYPE_KWS:
            base = _TYPE_KWS[t.text]
        elif t.kind == "ident":
            base = A.opaque(t.text)
        else:
            self.pos -= 1
            self.error(f"expected a type, found {t.text!r}")
        dims = 0
        while self.at("[") and self.peek().text == "]":
            self.advance()
            self.advance()
            dims += 1
        if dims:
            if base.kind == "unit":
                self.error("void arrays are not allowed")
            return A.array_of(base, dims)
        return base

    # -- top level ---------------------------------------------------------

    def parse_function(self) -> A.Program:
        start = self.tok
        ret = self.parse_type()
        name_tok = self.advance()
        if name_tok.kind != "ident":
            self.pos -= 1
            self.error("expected function name")
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                ptype = self.parse_type()
                pname = self.advance()
                if pname.kind != "ident":
                    self.pos -= 1
                    self.error("expected parameter name")
                params.append(A.Param(pname.text, ptype))
                if not self.accept(","):
                    break
        self.expect(")")
        body = self.parse_block()
        return A.Program(name_tok.text, tuple(params), ret, body, span=self.span_from(start))

    def parse_block(self) -> A.Block:
        start = self.expect("{")
        stmts = self.parse_stmt_list(until="}")
        self.expect("}")
        return A.Block(tuple(stmts), span=self.span_from(start))

    def parse_stmt_list(self, until: str | None) -> list[A.Stmt]:
        stmts: list[A.Stmt] = []
        while not (self.tok.kind == "eof" or (until is not None and self.at(until))):
            stmts.extend(self.parse_stmt())
        return stmts

    # -- statements --------------------------------------------------------

    def parse_single(self) -> A.Stmt:
        start = self.tok
        stmts = self.parse_stmt()
        if len(stmts) == 1:
            return stmts[0]
        return A.Block(tuple(stmts), span=self.span_from(start))

    def parse_stmt(self) -> list[A.Stmt]:
        t = self.tok
        if self.at("{"):
            return [self.parse_block()]
        if self.at(";"):
            self.advance()
            return [A.Block((), span=t.span)]
        if t.kind == "kw":
            if t.text == "if":
                self.advance()
                self.expect("(")
                guard = self.parse_expr()
                self.expect(")")
                then = self.parse_single()
                orelse = self.parse_single() if self.accept("else") else None
                return [A.If(guard, then, orelse, span=self.span_from(t))]
            if t.text == "while":
                self.advance()
                self.expect("(")
                guard = self.parse_expr()
                self.expect(")")
                body = self.parse_single()
                return [A.While(guard, body, span=self.span_from(t))]
            if t.text == "for":
                return [self.parse_for()]
            if t.text == "return":
                self.advance()
                value = None if self.at(";") else self.parse_expr()
                self.expect(";")
                return [A.Return(value, span=self.span_from(t))]
        if t.kind == "hole" and not _continues_expr(self.peek()):
            self.advance()
            self.accept(";")
            return [A.StmtHole(self.new_hole("stmt"), span=self.span_from(t))]
        if t.kind == "ident" and t.text == "__solution__":
            if not self.allow_marker:
                self.error("__solution__ is only allowed in a TEST block")
            self.advance()
            self.accept(";")
            return [A.SolutionMarker(span=t.span)]
        if self.at_type_start():
            lets = self.parse_decl()
            self.expect(";")
            return lets
        expr = self.parse_expr()
        if isinstance(expr, A.ExprHole):
            raise SpliceSyntaxError("an expression hole cannot stand alone as a statement",
                                    t.span)
        self.expect(";")
        return [A.ExprStmt(expr, span=self.span_from(t))]

    def parse_decl(self) -> list[A.Stmt]:
        start = self.tok
        typ = self.parse_type()
        if typ.kind == "unit":
            self.error("cannot declare a void variable")
        lets = []
        while True:
            name = self.advance()
            if name.kind != "ident":
                self.pos -= 1
                self.error("expected variable name")
            init = self.parse_expr() if self.accept("=") else None
            lets.append(A.Let(name.text, typ, init, span=self.span_from(start)))
            if not self.accept(","):
                break
        return lets

    def parse_for(self) -> A.Stmt:
        start = self.advance()
        self.expect("(")
        init = None
        if not self.at(";"):
            t = self.tok
            if self.at_type_start():
                lets = self.parse_decl()
                if len(lets) != 1:
                    self.error("only one declaration is allowed in a for initializer")
                init = lets[0]
            else:
                init = A.ExprStmt(self.parse_expr(), span=self.span_from(t))
        self.expect(";")
        guard = None if self.at(";") else self.parse_expr()
        self.expect(";")
        step = None if self.at(")") else self.parse_expr()
        self.expect(")")
        body = self.parse_single()
        return A.For(init, guard, step, body, span=self.span_from(start))

    # -- expressions -------------------------------------------------------

    def parse_expr(self) -> A.Expr:
        start = self.tok
        lhs = self.parse_binary(0)
        if self.tok.kind == "op" and self.tok.text in _ASSIGN_OPS:
            op = self.advance().text
            if not isinstance(lhs, (A.Var, A.Index, A.ExprHole)):
                raise SpliceSyntaxError("invalid assignment target", start.span)
            rhs = self.parse_expr()
            if op != "=":
                if isinstance(lhs, A.ExprHole):
                    raise SpliceSyntaxError("compound assignment to a hole", start.span)
                rhs = A.Binop(op[0], lhs, rhs, span=self.span_from(start))
            return A.Assign(lhs, rhs, span=self.span_from(start))
        return lhs

    def parse_binary(self, level: int) -> A.Expr:
        if level == len(_BINARY_LEVELS):
            return self.parse_unary()
        start = self.tok
        lhs = self.parse_binary(level + 1)
        ops = _BINARY_LEVELS[level]
        while self.tok.kind == "op" and self.tok.text in ops:
            op = self.advance().text
            rhs = self.parse_binary(level + 1)
            lhs = A.Binop(op, lhs, rhs, span=self.span_from(start))
        return lhs

    def parse_unary(self) -> A.Expr:
        t = self.tok
        if t.kind == "op" and t.text in ("-", "!", "++", "--"):
            self.advance()
            operand = self.parse_unary()
            if t.text in ("++", "--") and not isinstance(operand, (A.Var, A.Index)):
                raise SpliceSyntaxError(f"{t.text} needs a variable or array element", t.span)
            return A.Unop(t.text, operand, False, span=self.span_from(t))
        return self.parse_postfix()

    def parse_postfix(self) -> A.Expr:
        start = self.tok
        e, parenthesized = self.parse_primary()
        while True:
            if self.at("["):
                self.advance()
                idx = self.parse_expr()
                self.expect("]")
                if isinstance(e, A.Index) and not parenthesized:
                    e = A.Index(e.base, e.indices + (idx,), span=self.span_from(start))
                else:
                    e = A.Index(e, (idx,), span=self.span_from(start))
            elif self.at("."):
                self.advance()
                member = self.advance()
                if member.text != "length":
                    self.pos -= 1
                    self.error("only .length is supported")
                e = A.Length(e, span=self.span_from(start))
            elif self.tok.kind == "op" and self.tok.text in ("++", "--"):
                op = self.advance().text
                if not isinstance(e, (A.Var, A.Index)):
                    raise SpliceSyntaxError(f"{op} needs a variable or array element",
                                            start.span)
                e = A.Unop(op, e, True, span=self.span_from(start))
            else:
                return e
            parenthesized = False

    def parse_primary(self) -> tuple[A.Expr, bool]:
        t = self.tok
        if t.kind == "int":
            self.advance()
            return A.IntLit(t.value, span=t.span), False
        if t.kind == "str":
            self.advance()
            return A.StrLit(t.value, span=t.span), False
        if t.kind == "hole":
            self.advance()
            return A.ExprHole(self.new_hole("expr"), span=t.span), False
        if t.kind == "kw":
            if t.text in ("true", "false"):
                self.advance()
                return A.BoolLit(t.text == "true", span=t.span), False
            if t.text == "new":
                self.advance()
                elem_tok = self.advance()
                if elem_tok.kind == "kw" and elem_tok.text in _TYPE_KWS and elem_tok.text != "void":
                    elem = _TYPE_KWS[elem_tok.text]
                elif elem_tok.kind == "ident":
                    elem = A.opaque(elem_tok.text)
                else:
                    self.pos -= 1
                    self.error("expected element type after new")
                sizes = []
                while self.at("["):
                    self.advance()
                    sizes.append(self.parse_expr())
                    self.expect("]")
                if not sizes:
                    self.error("expected array size")
                return A.NewArray(elem, tuple(sizes), span=self.span_from(t)), False
        if t.kind == "op":
            if t.text == "(":
                self.advance()
                e = self.parse_expr()
                self.expect(")")
                return e, True
            if t.text == "{":
                self.advance()
                elems = []
                if not self.at("}"):
                    while True:
                        elems.append(self.parse_expr())
                        if not self.accept(","):
                            break
                self.expect("}")
                return A.ArrayLit(tuple(elems), span=self.span_from(t)), False
        if t.kind == "ident":
            self.advance()
            if self.at("("):
                self.advance()
                args = []
                if not self.at(")"):
                    while True:
                        args.append(self.parse_expr())
                        if not self.accept(","):
                            break
                self.expect(")")
                return A.Call(t.text, tuple(args), span=self.span_from(t)), False
            return A.Var(t.text, span=t.span), False
        self.error(f"unexpected {t.text or 'end of input'!r}")


def parse_function_text(text: str):
    """Parse one function; returns ``(program, hole kinds, comments)``."""
    tokens, comments = tokenize(text)
    p = Parser(tokens)
    prog = p.parse_function()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r} after function")
    return prog, p.holes, comments


def parse_statements(text: str, *, allow_marker: bool = False) -> A.Block:
    tokens, _ = tokenize(text)
    p = Parser(tokens, allow_marker=allow_marker)
    stmts = p.parse_stmt_list(until=None)
    if p.holes:
        raise SpliceSyntaxError("holes are not allowed here", tokens[0].span)
    return A.Block(tuple(stmts))


def _function_chunks(tokens: list[Token]):
    """Token ranges ``[lo, hi)`` of top-level functions, split at the brace that
    closes each function body."""
    i, n = 0, len(tokens) - 1  # last token is eof
    while i < n:
        j = i
        while j < n and tokens[j].text != "{":
            j += 1
        depth = 0
        while j < n:
            if tokens[j].kind == "op" and tokens[j].text == "{":
                depth += 1
            elif tokens[j].kind == "op" and tokens[j].text == "}":
                depth -= 1
                if depth == 0:
                    break
            j += 1
        hi = min(j + 1, n)
        yield i, hi
        i = hi


def parse_functions(text: str, *, errors: list | None = None) -> list[FunctionSource]:
    """Parse a corpus unit: zero or more hole-free functions.

    Comments preceding a function (after the previous one) and comments inside
    its body are attached to it. When ``errors`` is given, a function that
    fails to parse is skipped and ``(offset, exception)`` is appended to it;
    otherwise the first error propagates.
    """
    tokens, comments = tokenize(text)
    eof = tokens[-1]
    found: list[FunctionSource] = []
    bounds: list[int] = []  # end offset of every chunk, parsed or not
    for lo, hi in _function_chunks(tokens):
        bounds.append(tokens[hi - 1].span.end)
        p = Parser(tokens[lo:hi] + [eof])
        try:
            prog = p.parse_function()
            if p.tok.kind != "eof":
                p.error(f"unexpected {p.tok.text!r} after function")
            if p.holes:
                raise SpliceSyntaxError(f"hole in corpus function {prog.name}", prog.span)
        except SpliceSyntaxError as exc:
            if errors is None:
                raise
            errors.append((tokens[lo].span.start, exc))
            continue
        found.append(FunctionSource(prog, tokens[lo].span.start, tokens[hi - 1].span.end))
    for fs in found:
        prev_end = max((b for b in bounds if b <= fs.start), default=0)
        fs.comments.extend(clean_comment(c) for c in comments
                           if prev_end <= c.span.start < fs.end)
    return found


def clean_comment(c: Comment) -> str:
    if not c.block:
        return c.text.strip()
    lines = []
    for line in c.text.splitlines():
        s = line.strip()
        if s.startswith("*"):
            s = s[1:].strip()
        lines.append(s)
    return "\n".join(lines).strip()
