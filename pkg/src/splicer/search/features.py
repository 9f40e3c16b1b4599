"""Natural-language and name features of a function."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from ..lang import ast as A
from .text import default_dictionary, default_stopwords, split_identifier, split_text, stem

NAME_BOOST = 5


@dataclass
class TermBag:
    """Raw term counts, with terms coming from the function name kept apart."""

    name_counts: Counter = field(default_factory=Counter)
    other_counts: Counter = field(default_factory=Counter)

    def total(self) -> Counter:
        return self.name_counts + self.other_counts

    def boosted_tf(self, term: str) -> int:
        return self.other_counts[term] + NAME_BOOST * self.name_counts[term]

    def terms(self) -> set[str]:
        return set(self.name_counts) | set(self.other_counts)


def declared_names(p: A.Program) -> list[str]:
    """Parameter names then local variable names, each once, in order."""
    seen: dict[str, None] = {}
    for q in p.params:
        seen.setdefault(q.name)
    for n in A.walk(p.body):
        if isinstance(n, A.Let):
            seen.setdefault(n.name)
    return list(seen)


def _normalize(words, stopwords) -> list[str]:
    out = []
    for w in words:
        w = w.lower()
        if len(w) < 2 or w.isdigit() or w in stopwords:
            continue
        s = stem(w)
        if len(s) >= 2 and s not in stopwords:
            out.append(s)
    return out


def extract_nl_terms(p: A.Program, comments=(), dictionary=None, stopwords=None) -> TermBag:
    """Terms from the function name, comments, and parameter/local names."""
    dictionary = default_dictionary() if dictionary is None else dictionary
    stopwords = default_stopwords() if stopwords is None else stopwords
    bag = TermBag()
    bag.name_counts.update(_normalize(split_identifier(p.name, dictionary), stopwords))
    words = []
    for c in comments:
        words.extend(split_text(c, dictionary))
    for name in declared_names(p):
        words.extend(split_identifier(name, dictionary))
    bag.other_counts.update(_normalize(words, stopwords))
    return bag


def extract_names(p: A.Program, dictionary=None) -> frozenset[str]:
    """Identifier words of the function name and every variable name (unstemmed)."""
    dictionary = default_dictionary() if dictionary is None else dictionary
    names = {p.name} | {q.name for q in p.params}
    for n in A.walk(p.body):
        if isinstance(n, A.Let):
            names.add(n.name)
        elif isinstance(n, A.Var):
            names.add(n.name)
    words = set()
    for name in names:
        words.update(w.lower() for w in split_identifier(name, dictionary))
    return frozenset(words)
