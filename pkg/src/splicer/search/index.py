"""Corpus index: tf-idf weighted terms plus name sets, and k-NN queries.

Index file layout (UTF-8, one JSON document per line):

1. header: ``{"format": "splicer-index", "version": 1, "ndocs": N, "root": ...,
   "dictionary_sha256": ..., "stopwords_sha256": ...}``
2. ``{"doc_freq": {term: count, ...}}``
3. N entry lines: ``{"id", "path", "start", "end", "nl": [[term, weight], ...],
   "names": [...]}`` where ``path`` is relative to ``root`` and
   ``start``/``end`` are byte offsets of the function's source text.

Programs are re-parsed from their source range when an index is loaded.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..errors import EmptyIndex, IngestError, SpliceError
from ..lang import ast as A
from ..lang.parser import parse_functions
from ..lang.typecheck import check_program
from .features import TermBag, extract_names, extract_nl_terms
from .text import default_dictionary, default_stopwords, word_set_digest

FORMAT = "splicer-index"
VERSION = 1


@dataclass(frozen=True)
class QueryWeights:
    w_nl: float = 0.8
    w_names: float = 0.2

    def __post_init__(self):
        if self.w_nl < 0 or self.w_names < 0 or not math.isclose(self.w_nl + self.w_names, 1.0):
            raise ValueError("query weights must be non-negative and sum to 1")


@dataclass(frozen=True)
class FeatureVector:
    nl_weights: dict
    names: frozenset
    source_id: int = -1

    @property
    def norm(self) -> float:
        return math.sqrt(math.fsum(w * w for w in self.nl_weights.values()))


@dataclass
class IndexEntry:
    source_id: int
    path: str
    start: int
    end: int
    features: FeatureVector
    program: A.Program
    comments: list = field(default_factory=list)
    norm: float = 0.0


@dataclass
class CorpusIndex:
    entries: list = field(default_factory=list)
    doc_freq: dict = field(default_factory=dict)
    dictionary: frozenset = field(default_factory=default_dictionary)
    stopwords: frozenset = field(default_factory=default_stopwords)
    root: str = ""
    _nl_postings: Optional[dict] = field(default=None, repr=False, compare=False)
    _name_postings: Optional[dict] = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.entries)

    def entry(self, source_id: int) -> IndexEntry:
        return self.entries[source_id]

    def postings(self):
        if self._nl_postings is None:
            nl, names = {}, {}
            for e in self.entries:
                for t, w in e.features.nl_weights.items():
                    if w > 0:
                        nl.setdefault(t, []).append(e.source_id)
                for n in e.features.names:
                    names.setdefault(n, []).append(e.source_id)
            self._nl_postings, self._name_postings = nl, names
        return self._nl_postings, self._name_postings


# ---------------------------------------------------------------------------
# Weights and similarities
# ---------------------------------------------------------------------------


def tfidf(bag: TermBag, doc_freq: dict, ndocs: int) -> dict:
    """weight(t) = tf'(t) * ln(N / df(t)), tf' counting name terms five times.

    Terms unknown to the corpus (df = 0) are dropped.
    """
    out = {}
    for t in sorted(bag.terms()):
        df = doc_freq.get(t, 0)
        if df == 0 or ndocs == 0:
            continue
        out[t] = bag.boosted_tf(t) * math.log(ndocs / df)
    return out


def cosine(a: dict, b: dict) -> float:
    if len(a) > len(b):
        a, b = b, a
    dot = math.fsum(w * b[t] for t, w in a.items() if t in b)
    na = math.sqrt(math.fsum(w * w for w in a.values()))
    nb = math.sqrt(math.fsum(w * w for w in b.values()))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return min(1.0, dot / (na * nb))


def jaccard(a, b) -> float:
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


# ---------------------------------------------------------------------------
# Building
# ---------------------------------------------------------------------------


@dataclass
class _Pending:
    path: str
    start: int
    end: int
    program: A.Program
    comments: list
    bag: TermBag


def _byte_offset(text: str, char_offset: int) -> int:
    return len(text[:char_offset].encode())


def collect_functions(files, registry=None, skipped: Optional[list] = None,
                      dictionary=None, stopwords=None) -> list[_Pending]:
    """Parse ``(relative path, text)`` pairs into type-correct functions."""
    pending = []
    for rel, text in files:
        errors: list = []
        try:
            found = parse_functions(text, errors=errors)
        except SpliceError as exc:
            if skipped is not None:
                skipped.append(IngestError(rel, str(exc)))
            continue
        for _, exc in errors:
            if skipped is not None:
                skipped.append(IngestError(rel, str(exc)))
        for fs in found:
            try:
                check_program(fs.program, registry)
            except SpliceError as exc:
                if skipped is not None:
                    skipped.append(IngestError(rel, f"{fs.program.name}: {exc}"))
                continue
            bag = extract_nl_terms(fs.program, fs.comments, dictionary, stopwords)
            pending.append(_Pending(rel, _byte_offset(text, fs.start), _byte_offset(text, fs.end),
                                    fs.program, fs.comments, bag))
    return pending


def index_from_pending(pending: list[_Pending], dictionary=None, stopwords=None,
                       root: str = "") -> CorpusIndex:
    dictionary = default_dictionary() if dictionary is None else dictionary
    stopwords = default_stopwords() if stopwords is None else stopwords
    doc_freq: dict[str, int] = {}
    for p in pending:
        for t in p.bag.terms():
            doc_freq[t] = doc_freq.get(t, 0) + 1
    n = len(pending)
    entries = []
    for sid, p in enumerate(pending):
        fv = FeatureVector(tfidf(p.bag, doc_freq, n), extract_names(p.program, dictionary), sid)
        entries.append(IndexEntry(sid, p.path, p.start, p.end, fv, p.program, p.comments, fv.norm))
    return CorpusIndex(entries, dict(sorted(doc_freq.items())), dictionary, stopwords, root)


def build_index_from_sources(files, registry=None, skipped: Optional[list] = None,
                             dictionary=None, stopwords=None, root: str = "") -> CorpusIndex:
    pending = collect_functions(files, registry, skipped, dictionary, stopwords)
    return index_from_pending(pending, dictionary, stopwords, root)


def corpus_files(corpus_dir: str | Path) -> list[Path]:
    root = Path(corpus_dir)
    return sorted(p for p in root.rglob("*.spl") if p.is_file())


def build_index(corpus_dir: str | Path, registry=None, skipped: Optional[list] = None,
                dictionary=None, stopwords=None) -> CorpusIndex:
    """Index every function of every ``.spl`` file under ``corpus_dir``.

    Functions that fail to parse or type-check are reported through ``skipped``
    (as :class:`IngestError`) and left out.
    """
    root = Path(corpus_dir)
    if not root.is_dir():
        raise FileNotFoundError(f"not a directory: {root}")
    files = []
    for path in corpus_files(root):
        rel = path.relative_to(root).as_posix()
        try:
            files.append((rel, path.read_text()))
        except (OSError, UnicodeDecodeError) as exc:
            if skipped is not None:
                skipped.append(IngestError(rel, str(exc)))
    return build_index_from_sources(files, registry, skipped, dictionary, stopwords,
                                    str(root.resolve()))


# ---------------------------------------------------------------------------
# Queries
# ---------------------------------------------------------------------------


def query_features(index: CorpusIndex, program: A.Program, comments=()) -> FeatureVector:
    bag = extract_nl_terms(program, comments, index.dictionary, index.stopwords)
    return FeatureVector(tfidf(bag, index.doc_freq, len(index.entries)),
                         extract_names(program, index.dictionary))


def draft_features(index: CorpusIndex, draft) -> FeatureVector:
    """Query features of a draft: its comments and declarations (holes and the
    TEST block contribute nothing)."""
    return query_features(index, draft.program, draft.comments)


def score(q: FeatureVector, e: IndexEntry, w: QueryWeights) -> float:
    return w.w_nl * cosine(q.nl_weights, e.features.nl_weights) + \
        w.w_names * jaccard(q.names, e.features.names)


def knn_features(index: CorpusIndex, q: FeatureVector, k: int,
                 w: QueryWeights = QueryWeights()) -> list[tuple[int, float]]:
    """Top-``k`` entries by score, ties broken by ascending source id."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if not index.entries:
        raise EmptyIndex("the corpus index is empty")
    nl_post, name_post = index.postings()
    cand: set[int] = set()
    if w.w_nl > 0:
        for t, weight in q.nl_weights.items():
            if weight > 0:
                cand.update(nl_post.get(t, ()))
    if w.w_names > 0:
        for n in q.names:
            cand.update(name_post.get(n, ()))
    scored = []
    for sid in cand:
        s = score(q, index.entries[sid], w)
        if s > 0.0:
            scored.append((-s, sid))
    scored.sort()
    result = [(sid, -neg) for neg, sid in scored[:k]]
    if len(result) < k:
        # every remaining entry scores exactly zero
        positive = {sid for _, sid in scored}
        for e in index.entries:
            if len(result) >= k:
                break
            if e.source_id not in positive:
                result.append((e.source_id, 0.0))
    return result


def knn_query(index: CorpusIndex, draft, k: int = 5,
              w: QueryWeights = QueryWeights()) -> list[tuple[int, float]]:
    return knn_features(index, draft_features(index, draft), k, w)


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------


def save_index(index: CorpusIndex, path: str | Path) -> None:
    lines = [json.dumps({
        "format": FORMAT, "version": VERSION, "ndocs": len(index.entries), "root": index.root,
        "dictionary_sha256": word_set_digest(index.dictionary),
        "stopwords_sha256": word_set_digest(index.stopwords),
    }), json.dumps({"doc_freq": index.doc_freq})]
    for e in index.entries:
        lines.append(json.dumps({
            "id": e.source_id, "path": e.path, "start": e.start, "end": e.end,
            "nl": [[t, w] for t, w in e.features.nl_weights.items()],
            "names": sorted(e.features.names),
        }))
    Path(path).write_text("\n".join(lines) + "\n")


def load_index(path: str | Path, root: str | Path | None = None) -> CorpusIndex:
    """Load an index; sources are re-read from ``root`` (default: recorded root)."""
    raw = Path(path).read_text().splitlines()
    if not raw:
        raise SpliceError(f"{path}: empty index file")
    header = json.loads(raw[0])
    if header.get("format") != FORMAT or header.get("version") != VERSION:
        raise SpliceError(f"{path}: not a version-{VERSION} index")
    dictionary, stopwords = default_dictionary(), default_stopwords()
    if header["dictionary_sha256"] != word_set_digest(dictionary) or \
            header["stopwords_sha256"] != word_set_digest(stopwords):
        raise SpliceError(f"{path}: built with a different dictionary or stop-word list")
    doc_freq = json.loads(raw[1])["doc_freq"]
    base = Path(root) if root is not None else Path(header["root"])
    sources: dict[str, tuple] = {}
    entries = []
    for line in raw[2:2 + header["ndocs"]]:
        d = json.loads(line)
        if d["path"] not in sources:
            text = (base / d["path"]).read_bytes().decode()
            sources[d["path"]] = (text, parse_functions(text, errors=[]))
        text, fns = sources[d["path"]]
        prog, comments = _function_at(fns, text, d["start"])
        fv = FeatureVector({t: w for t, w in d["nl"]}, frozenset(d["names"]), d["id"])
        entries.append(IndexEntry(d["id"], d["path"], d["start"], d["end"], fv, prog, comments,
                                  fv.norm))
    return CorpusIndex(entries, doc_freq, dictionary, stopwords, str(base))


def _function_at(fns, text: str, byte_start: int):
    for fs in fns:
        if _byte_offset(text, fs.start) == byte_start:
            return fs.program, fs.comments
    raise SpliceError(f"no function at byte offset {byte_start}")
