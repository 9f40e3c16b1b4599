"""Identifier splitting, stop words and stemming."""

from __future__ import annotations

import hashlib
import re
from functools import lru_cache
from importlib import resources
from typing import Iterable

# lower->Upper, acronym->Word, letter<->digit boundaries
_CAMEL_RE = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|\d+")
_WORD_RE = re.compile(r"[A-Za-z0-9_]+")
MIN_DICT_WORD = 2


def load_word_list(text: str) -> frozenset[str]:
    return frozenset(w.strip().lower() for w in text.splitlines()
                     if w.strip() and not w.startswith("#"))


def _data_text(name: str) -> str:
    return resources.files("splicer").joinpath("data", name).read_text()


@lru_cache(maxsize=None)
def default_dictionary() -> frozenset[str]:
    return load_word_list(_data_text("dictionary.txt"))


@lru_cache(maxsize=None)
def default_stopwords() -> frozenset[str]:
    return load_word_list(_data_text("stopwords.txt"))


def word_set_digest(words: Iterable[str]) -> str:
    return hashlib.sha256("\n".join(sorted(words)).encode()).hexdigest()


def greedy_split(chunk: str, dictionary) -> list[str]:
    """Left-to-right split into longest dictionary prefixes; an unsplittable
    remainder is kept verbatim."""
    out = []
    i, n = 0, len(chunk)
    while i < n:
        for j in range(n, i + MIN_DICT_WORD - 1, -1):
            if chunk[i:j] in dictionary:
                out.append(chunk[i:j])
                i = j
                break
        else:
            out.append(chunk[i:])
            break
    return out


def split_identifier(token: str, dictionary=None) -> list[str]:
    """``faceDetector`` -> ``[face, detector]``, ``read_csv`` -> ``[read, csv]``,
    ``binsearch`` -> ``[bin, search]`` (given those dictionary words)."""
    if dictionary is None:
        dictionary = default_dictionary()
    words = []
    for part in token.split("_"):
        for chunk in _CAMEL_RE.findall(part):
            low = chunk.lower()
            if low.isdigit() or low in dictionary:
                words.append(low)
            else:
                words.extend(greedy_split(low, dictionary))
    return words


def split_text(text: str, dictionary=None) -> list[str]:
    """Words of free text, each run through :func:`split_identifier`."""
    out = []
    for tok in _WORD_RE.findall(text):
        out.extend(split_identifier(tok, dictionary))
    return out


@lru_cache(maxsize=None)
def _stemmer():
    from nltk.stem.porter import PorterStemmer

    return PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)


@lru_cache(maxsize=65536)
def stem(word: str) -> str:
    return _stemmer().stem(word)
