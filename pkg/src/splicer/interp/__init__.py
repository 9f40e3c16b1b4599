"""Evaluation of complete programs, API table, automata and test running."""

from .api import ApiRegistry, ApiSignature, OpaqueValue, default_registry, register_api, shared_registry
from .automaton import ApiAutomaton, EventPattern, check_automaton, load_automaton, parse_automaton
from .evaluator import ApiEvent, Compiled, Limits, evaluate
from .testing import RequirementRunner, run_automaton, run_tests, satisfies
from .vfs import VirtualFS

__all__ = [
    "ApiRegistry", "ApiSignature", "OpaqueValue", "default_registry", "register_api",
    "shared_registry", "ApiAutomaton", "EventPattern", "check_automaton", "load_automaton",
    "parse_automaton", "ApiEvent", "Compiled", "Limits", "evaluate", "run_automaton",
    "run_tests", "satisfies", "RequirementRunner", "VirtualFS",
]
