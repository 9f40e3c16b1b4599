from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import SpliceSyntaxError
from .ast import Span

KEYWORDS = frozenset({
    "int", "boolean", "String", "void", "if", "else", "while", "for", "return",
    "new", "true", "false",
})

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<hole>\?\?)
  | (?P<int>\d+)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\+\+|--|\+=|-=|\*=|/=|%=|==|!=|<=|>=|&&|\|\||[-+*/%<>=!(){}\[\];,.])
""", re.VERBOSE | re.DOTALL)

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\", "r": "\r", "0": "\0"}


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # ident | kw | int | str | op | hole | eof
    text: str
    span: Span

    @property
    def value(self):
        if self.kind == "int":
            return int(self.text)
        if self.kind == "str":
            return unescape(self.text[1:-1])
        return self.text


@dataclass(frozen=True, slots=True)
class Comment:
    text: str  # without the // or /* */ delimiters
    span: Span
    block: bool


def unescape(body: str) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            out.append(_ESCAPES.get(body[i + 1], body[i + 1]))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def escape(s: str) -> str:
    return (s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
            .replace("\t", "\\t").replace("\r", "\\r").replace("\0", "\\0"))


def tokenize(text: str) -> tuple[list[Token], list[Comment]]:
    tokens: list[Token] = []
    comments: list[Comment] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is not None and m.lastgroup == "op" and text.startswith("/*", pos):
            m = None
        if m is None:
            raise SpliceSyntaxError(f"unexpected character {text[pos]!r}",
                                    Span(pos, pos + 1, line, pos - line_start + 1))
        kind = m.lastgroup
        chunk = m.group()
        span = Span(pos, m.end(), line, pos - line_start + 1)
        if kind == "line_comment":
            comments.append(Comment(chunk[2:], span, False))
        elif kind == "block_comment":
            comments.append(Comment(chunk[2:-2], span, True))
        elif kind == "ident":
            tokens.append(Token("kw" if chunk in KEYWORDS else "ident", chunk, span))
        elif kind != "ws":
            tokens.append(Token(kind, chunk, span))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", Span(n, n, line, n - line_start + 1)))
    return tokens, comments
