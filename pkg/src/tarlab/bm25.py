"""BM25 ranking over an :class:`~tarlab.index.Index` and TREC run files."""

from __future__ import annotations

import math
import os
import re
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .analysis import analyze
from .index import PREFIX_CAP, Index
from .topics import Query
from .util import atomic_write_text, pmid_key

DEFAULT_CUTOFF = 1000
K1_GRID = (1.0, 1.2, 1.4, 1.6, 1.8, 2.0)
B_GRID = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)


@dataclass(frozen=True)
class BM25Params:
    k1: float = 1.2
    b: float = 0.75

    def __post_init__(self):
        if not self.k1 >= 0:
            raise ValueError(f"k1 must be >= 0, got {self.k1}")
        if not 0 <= self.b <= 1:
            raise ValueError(f"b must be in [0, 1], got {self.b}")


@dataclass(frozen=True)
class RunEntry:
    topic_id: str
    rank: int
    pmid: str
    score: float
    tag: str


def idf(N: int, df: int) -> float:
    return math.log(1.0 + (N - df + 0.5) / (df + 0.5))


def _wildcard_terms(index: Index, pattern: str) -> list[str]:
    prefix = pattern.split("*", 1)[0]
    if not prefix:
        return []
    if pattern.endswith("*") and pattern.count("*") == 1:
        return index.expand_prefix(prefix)
    rx = re.compile(".*".join(re.escape(p) for p in pattern.split("*")))
    out = []
    for term in index.iter_prefix(prefix):
        if rx.fullmatch(term):
            out.append(term)
            if len(out) == PREFIX_CAP:
                break
    return out


def query_weights(index: Index, raw_terms: Iterable[str]) -> dict[str, int]:
    """Analyzed query terms mapped to their multiplicity, in first-seen order.

    Raw terms holding a ``*`` are matched against the dictionary instead of
    being analyzed; every expansion counts once per wildcard occurrence.
    """
    weights: Counter = Counter()
    for raw in raw_terms:
        if "*" in raw:
            weights.update(_wildcard_terms(index, raw.lower()))
        else:
            weights.update(analyze(raw, index.chain))
    return dict(weights)


def score(index: Index, analyzed_terms: Sequence[str], params: BM25Params, docid: int) -> float:
    """BM25 score of one document for already-analyzed query terms."""
    if not 0 <= docid < index.N:
        raise ValueError(f"invalid docid {docid} (index has {index.N} documents)")
    avgdl = index.avgdl or 1.0
    norm = params.k1 * (1 - params.b + params.b * int(index.doc_lengths[docid]) / avgdl)
    total = 0.0
    for term, qtf in Counter(analyzed_terms).items():
        entry = index.postings_map.get(term)
        if entry is None:
            continue
        docids, tfs = entry
        pos = int(np.searchsorted(docids, docid))
        if pos == len(docids) or docids[pos] != docid:
            continue
        tf = int(tfs[pos])
        total += qtf * idf(index.N, len(docids)) * (tf * (params.k1 + 1)) / (tf + norm)
    return total


def score_all(index: Index, weights: dict[str, int], params: BM25Params) -> np.ndarray:
    """Scores of every document, accumulated term by term."""
    scores = np.zeros(index.N, dtype=np.float64)
    avgdl = index.avgdl or 1.0
    for term, qtf in weights.items():
        entry = index.postings_map.get(term)
        if entry is None:
            continue
        docids, tfs = entry
        tf = tfs.astype(np.float64)
        norm = params.k1 * (1 - params.b + params.b * index.doc_lengths[docids] / avgdl)
        scores[docids] += qtf * idf(index.N, len(docids)) * (tf * (params.k1 + 1)) / (tf + norm)
    return scores


def rank(index: Index, scores: np.ndarray, cutoff: int) -> list[tuple[int, float]]:
    """(docid, score) for positive scores, by score desc then pmid asc."""
    hits = np.flatnonzero(scores > 0)
    order = sorted(hits.tolist(), key=lambda d: (-scores[d], pmid_key(index.pmids[d])))
    return [(d, float(scores[d])) for d in order[:cutoff]]


def search(index: Index, query: Query, params: BM25Params = BM25Params(),
           cutoff: int = DEFAULT_CUTOFF, tag: str = "bm25") -> list[RunEntry]:
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    weights = query_weights(index, query.terms)
    if not weights:
        return []
    ranked = rank(index, score_all(index, weights, params), cutoff)
    return [RunEntry(query.topic_id, i, index.pmids[d], s, tag)
            for i, (d, s) in enumerate(ranked, 1)]


def run_queries(index: Index, queries: Iterable[Query], params: BM25Params = BM25Params(),
                cutoff: int = DEFAULT_CUTOFF, tag: str = "bm25") -> list[RunEntry]:
    entries = []
    for q in sorted(queries, key=lambda q: q.topic_id):
        entries.extend(search(index, q, params, cutoff, tag))
    return entries


def sweep(index: Index, queries: Sequence[Query], axis: str, values: Iterable[float],
          fixed: BM25Params = BM25Params(), cutoff: int = DEFAULT_CUTOFF,
          tag: str = "bm25") -> dict[float, list[RunEntry]]:
    """One run per value of ``axis`` ("k1" or "b"), the other parameter held at ``fixed``."""
    if axis not in ("k1", "b"):
        raise ValueError(f"sweep axis must be 'k1' or 'b', got {axis!r}")
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    return {v: run_queries(index, queries, replace(fixed, **{axis: v}), cutoff, tag) for v in values}


class RunFormatError(ValueError):
    pass


def format_run(entries: Iterable[RunEntry]) -> str:
    lines = []
    for e in sorted(entries, key=lambda e: (e.topic_id, e.rank)):
        if any(ch.isspace() for ch in e.tag) or not e.tag:
            raise RunFormatError(f"run tag must be a non-empty word, got {e.tag!r}")
        lines.append(f"{e.topic_id} Q0 {e.pmid} {e.rank} {e.score:.6f} {e.tag}\n")
    return "".join(lines)


def write_run(entries: Iterable[RunEntry], path: str | os.PathLike) -> Path:
    return atomic_write_text(path, format_run(entries))


def parse_run(text: str) -> list[RunEntry]:
    entries = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 6:
            raise RunFormatError(f"line {lineno}: expected 6 fields, got {len(parts)}")
        topic, _q0, pmid, rank_, score_, tag = parts
        try:
            entries.append(RunEntry(topic, int(rank_), pmid, float(score_), tag))
        except ValueError:
            raise RunFormatError(f"line {lineno}: bad rank or score in {line!r}") from None
    return entries


def read_run(path: str | os.PathLike) -> list[RunEntry]:
    return parse_run(Path(path).read_text(encoding="utf-8"))
