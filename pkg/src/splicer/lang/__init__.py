"""The splice language: AST, parser, printer, types and drafts."""

from .ast import BOOL, INT, STR, UNIT, Program, Type, array_of, opaque
from .desugar import desugar
from .draft import Draft, Tests, AutomatonRequirement, infer_hole_type, load_draft, parse_draft, parse_program
from .printer import pretty_print

__all__ = [
    "BOOL", "INT", "STR", "UNIT", "Program", "Type", "array_of", "opaque", "desugar",
    "Draft", "Tests", "AutomatonRequirement", "infer_hole_type", "load_draft", "parse_draft",
    "parse_program", "pretty_print",
]
