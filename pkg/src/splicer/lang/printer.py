"""Pretty-printer producing text that re-parses to an equal AST."""

from __future__ import annotations

from . import ast as A
from .lexer import escape

_PREC = {
    "||": 2, "&&": 3, "==": 4, "!=": 4, "<": 5, "<=": 5, ">": 5, ">=": 5,
    "+": 6, "-": 6, "*": 7, "/": 7, "%": 7,
}
_ASSIGN_PREC = 1
_UNARY_PREC = 8
_POSTFIX_PREC = 9

INDENT = "  "


def expr_to_str(e: A.Expr, min_prec: int = 0) -> str:
    t = type(e)
    if t is A.Var:
        return e.name
    if t is A.IntLit:
        return str(e.value)
    if t is A.BoolLit:
        return "true" if e.value else "false"
    if t is A.StrLit:
        return f'"{escape(e.value)}"'
    if t is A.ExprHole:
        return "??"
    if t is A.Binop:
        p = _PREC[e.op]
        text = f"{expr_to_str(e.lhs, p)} {e.op} {expr_to_str(e.rhs, p + 1)}"
        return f"({text})" if p < min_prec else text
    if t is A.Assign:
        text = f"{expr_to_str(e.target, _POSTFIX_PREC)} = {expr_to_str(e.value, _ASSIGN_PREC)}"
        return f"({text})" if _ASSIGN_PREC < min_prec else text
    if t is A.Unop:
        if e.postfix:
            return f"{expr_to_str(e.operand, _POSTFIX_PREC)}{e.op}"
        inner = expr_to_str(e.operand, _UNARY_PREC)
        if inner[0] in "-+" and e.op in ("-", "--", "++"):
            inner = " " + inner
        text = f"{e.op}{inner}"
        return f"({text})" if _UNARY_PREC < min_prec else text
    if t is A.Index:
        base = expr_to_str(e.base, _POSTFIX_PREC)
        if type(e.base) in (A.Index, A.NewArray):
            base = f"({base})"
        return base + "".join(f"[{expr_to_str(i)}]" for i in e.indices)
    if t is A.Length:
        base = expr_to_str(e.base, _POSTFIX_PREC)
        return f"{base}.length"
    if t is A.Call:
        return f"{e.fname}({', '.join(expr_to_str(a) for a in e.args)})"
    if t is A.NewArray:
        return f"new {e.elem}" + "".join(f"[{expr_to_str(s)}]" for s in e.sizes)
    if t is A.ArrayLit:
        return "{" + ", ".join(expr_to_str(x) for x in e.elems) + "}"
    raise TypeError(f"not an expression: {e!r}")


def _for_init(s: A.Stmt) -> str:
    if isinstance(s, A.Let):
        return _let_text(s)
    return expr_to_str(s.expr)


def _let_text(s: A.Let) -> str:
    if s.init is None:
        return f"{s.type} {s.name}"
    return f"{s.type} {s.name} = {expr_to_str(s.init)}"


def stmt_lines(s: A.Stmt, depth: int = 0) -> list[str]:
    pad = INDENT * depth
    t = type(s)
    if t is A.Block:
        out = [pad + "{"]
        for c in s.stmts:
            out.extend(stmt_lines(c, depth + 1))
        out.append(pad + "}")
        return out
    if t is A.Let:
        return [f"{pad}{_let_text(s)};"]
    if t is A.ExprStmt:
        return [f"{pad}{expr_to_str(s.expr)};"]
    if t is A.Return:
        return [f"{pad}return;" if s.value is None else f"{pad}return {expr_to_str(s.value)};"]
    if t is A.StmtHole:
        return [f"{pad}??;"]
    if t is A.SolutionMarker:
        return [f"{pad}__solution__"]
    if t is A.If:
        then = s.then
        if s.orelse is not None and isinstance(then, A.If) and then.orelse is None:
            # dangling else would re-associate; braces are the only spelling
            then = A.Block((then,))
        out = _headed(f"if ({expr_to_str(s.guard)})", then, depth)
        if s.orelse is not None:
            if isinstance(s.orelse, A.If):
                rest = stmt_lines(s.orelse, depth)
                rest[0] = rest[0].lstrip()
                out = _join_else(out, pad, "else " + rest[0])
                out.extend(rest[1:])
            else:
                sub = _headed("else", s.orelse, depth)
                out = _join_else(out, pad, sub[0].lstrip())
                out.extend(sub[1:])
        return out
    if t is A.While:
        return _headed(f"while ({expr_to_str(s.guard)})", s.body, depth)
    if t is A.For:
        init = _for_init(s.init) if s.init is not None else ""
        guard = expr_to_str(s.guard) if s.guard is not None else ""
        step = expr_to_str(s.step) if s.step is not None else ""
        return _headed(f"for ({init}; {guard}; {step})", s.body, depth)
    raise TypeError(f"not a statement: {s!r}")


def _headed(head: str, body: A.Stmt, depth: int) -> list[str]:
    pad = INDENT * depth
    if isinstance(body, A.Block):
        inner = stmt_lines(body, depth)
        return [f"{pad}{head} {{"] + inner[1:]
    return [f"{pad}{head}"] + stmt_lines(body, depth + 1)


def _join_else(out: list[str], pad: str, else_head: str) -> list[str]:
    if out[-1].strip() == "}":
        out[-1] = f"{pad}}} {else_head}"
    else:
        out.append(f"{pad}{else_head}")
    return out


def pretty_print(p: A.Program) -> str:
    params = ", ".join(f"{q.type} {q.name}" for q in p.params)
    body = stmt_lines(p.body, 0)
    return f"{p.ret} {p.name}({params}) " + "\n".join(body) + "\n"


def stmt_to_str(s: A.Stmt) -> str:
    return "\n".join(stmt_lines(s)) + "\n"
