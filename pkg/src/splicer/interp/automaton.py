"""Deterministic automata over API-call events, and their text format.

Format (one directive per line, ``#`` starts a comment)::

    states: s0 s1 s2
    start: s0
    accept: s2
    wildcard: on
    trans: s0 open s1
    trans: s1 read@File s2

A pattern ``fname@Type`` matches only events whose receiver type is ``Type``;
a bare ``fname`` matches any receiver.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Optional

from ..errors import SpliceSyntaxError


@dataclass(frozen=True)
class EventPattern:
    fname: str
    receiver: Optional[str] = None

    def matches(self, event) -> bool:
        return self.fname == event.fname and (
            self.receiver is None or self.receiver == event.receiver_type)

    def __str__(self) -> str:
        return self.fname if self.receiver is None else f"{self.fname}@{self.receiver}"

    @classmethod
    def parse(cls, text: str) -> "EventPattern":
        name, _, recv = text.partition("@")
        return cls(name, recv or None)


@dataclass(frozen=True)
class ApiAutomaton:
    states: frozenset
    start: str
    accepting: frozenset
    transitions: Mapping = field(default_factory=dict)  # (state, EventPattern) -> state
    wildcard: bool = True

    @cached_property
    def alphabet(self) -> frozenset:
        return frozenset(p for _, p in self.transitions)

    @cached_property
    def _patterns(self) -> tuple:
        # receiver-specific patterns take precedence over bare names
        return tuple(sorted(self.alphabet, key=lambda p: (p.receiver is None, p.fname,
                                                          p.receiver or "")))

    def step(self, state: str, event) -> Optional[str]:
        """Next state, or ``None`` when the event rejects."""
        matching = [p for p in self._patterns if p.matches(event)]
        if not matching:
            return state if self.wildcard else None
        for p in matching:
            nxt = self.transitions.get((state, p))
            if nxt is not None:
                return nxt
        return None

    def accepts(self, trace: Iterable) -> bool:
        state = self.start
        for event in trace:
            state = self.step(state, event)
            if state is None:
                return False
        return state in self.accepting


def check_automaton(trace: Iterable, a: ApiAutomaton) -> bool:
    return a.accepts(trace)


def parse_automaton(text: str, source: str = "<automaton>") -> ApiAutomaton:
    states: list[str] = []
    start = None
    accept: list[str] = []
    wildcard = True
    transitions: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise SpliceSyntaxError(f"{source}: expected 'key: value'", f"line {lineno}")
        key, words = key.strip(), rest.split()
        if key == "states":
            states.extend(words)
        elif key == "start":
            if len(words) != 1:
                raise SpliceSyntaxError(f"{source}: one start state expected", f"line {lineno}")
            start = words[0]
        elif key == "accept":
            accept.extend(words)
        elif key == "wildcard":
            if words not in (["on"], ["off"]):
                raise SpliceSyntaxError(f"{source}: wildcard must be on or off",
                                        f"line {lineno}")
            wildcard = words == ["on"]
        elif key == "trans":
            if len(words) != 3:
                raise SpliceSyntaxError(f"{source}: trans needs 'src pattern dst'",
                                        f"line {lineno}")
            src, pat, dst = words
            k = (src, EventPattern.parse(pat))
            if k in transitions and transitions[k] != dst:
                raise SpliceSyntaxError(f"{source}: nondeterministic transition {src} {pat}",
                                        f"line {lineno}")
            transitions[k] = dst
        else:
            raise SpliceSyntaxError(f"{source}: unknown directive {key!r}", f"line {lineno}")
    if start is None:
        raise SpliceSyntaxError(f"{source}: missing start state")
    known = set(states)
    used = {start, *accept} | {s for s, _ in transitions} | set(transitions.values())
    if states and not used <= known:
        raise SpliceSyntaxError(f"{source}: undeclared states {sorted(used - known)}")
    return ApiAutomaton(frozenset(states or used), start, frozenset(accept), transitions,
                        wildcard)


def load_automaton(path: str | Path) -> ApiAutomaton:
    path = Path(path)
    return parse_automaton(path.read_text(), str(path))
