"""trec_eval-compatible evaluation of TREC runs.

Implements the measures reported for the experiments: average precision
(aggregated to MAP), precision at 10/20/30 documents and 11-point
interpolated precision. Unjudged documents count as non-relevant and topics
without relevant documents are left out of the averages.
"""

from __future__ import annotations

import logging
import os
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .bm25 import RunEntry
from .util import pmid_key

log = logging.getLogger(__name__)

RECALL_LEVELS = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
PRECISION_CUTOFFS = (10, 20, 30)
METRICS = (("map",) + tuple(f"P_{k}" for k in PRECISION_CUTOFFS)
           + tuple(f"iprec_at_recall_{r:.2f}" for r in RECALL_LEVELS))


class QrelsFormatError(ValueError):
    pass


class NoRelevantDocuments(ValueError):
    """Raised for a topic with no relevant judgments; such topics are not scored."""


@dataclass
class Qrels:
    judgments: dict[tuple[str, str], int] = field(default_factory=dict)

    def __post_init__(self):
        self._relevant: dict[str, set[str]] = defaultdict(set)
        for (topic, pmid), rel in self.judgments.items():
            if rel not in (0, 1):
                raise QrelsFormatError(f"non-binary relevance {rel} for ({topic}, {pmid})")
            if rel:
                self._relevant[topic].add(pmid)

    @property
    def topics(self) -> list[str]:
        return sorted({t for t, _ in self.judgments})

    def relevant(self, topic: str) -> set[str]:
        return self._relevant.get(topic, set())

    def num_relevant(self, topic: str) -> int:
        return len(self.relevant(topic))


def parse_qrels(text: str) -> Qrels:
    judgments = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 4:
            raise QrelsFormatError(f"line {lineno}: expected 4 columns, got {len(parts)}")
        topic, _iteration, pmid, rel = parts
        if rel not in ("0", "1"):
            raise QrelsFormatError(f"line {lineno}: relevance must be 0 or 1, got {rel!r}")
        judgments[(topic, pmid)] = int(rel)  # last line wins
    return Qrels(judgments)


def read_qrels(path: str | os.PathLike) -> Qrels:
    return parse_qrels(Path(path).read_text(encoding="utf-8"))


def _hits(ranked: Sequence[str], relevant: set[str]) -> list[bool]:
    seen = set()
    out = []
    for pmid in ranked:
        if pmid in seen:
            continue
        seen.add(pmid)
        out.append(pmid in relevant)
    return out


def _require_relevant(qrels: Qrels, topic: str) -> set[str]:
    relevant = qrels.relevant(topic)
    if not relevant:
        raise NoRelevantDocuments(f"topic {topic} has no relevant documents")
    return relevant


def average_precision(ranked_pmids: Sequence[str], qrels: Qrels, topic: str) -> float:
    relevant = _require_relevant(qrels, topic)
    found = 0
    total = 0.0
    for i, hit in enumerate(_hits(ranked_pmids, relevant), 1):
        if hit:
            found += 1
            total += found / i
    return total / len(relevant)


def precision_at_k(ranked_pmids: Sequence[str], qrels: Qrels, topic: str, k: int) -> float:
    return sum(_hits(ranked_pmids, qrels.relevant(topic))[:k]) / k


def interpolated_precision(ranked_pmids: Sequence[str], qrels: Qrels, topic: str) -> dict[float, float]:
    relevant = _require_relevant(qrels, topic)
    R = len(relevant)
    points = []  # (recall, precision) at each relevant hit
    found = 0
    for i, hit in enumerate(_hits(ranked_pmids, relevant), 1):
        if hit:
            found += 1
            points.append((found / R, found / i))
    out = {}
    for level in RECALL_LEVELS:
        out[level] = max((p for r, p in points if r >= level), default=0.0)
    return out


def topic_metrics(ranked_pmids: Sequence[str], qrels: Qrels, topic: str) -> dict[str, float]:
    m = {"map": average_precision(ranked_pmids, qrels, topic)}
    for k in PRECISION_CUTOFFS:
        m[f"P_{k}"] = precision_at_k(ranked_pmids, qrels, topic, k)
    for level, value in interpolated_precision(ranked_pmids, qrels, topic).items():
        m[f"iprec_at_recall_{level:.2f}"] = value
    return m


@dataclass
class MetricReport:
    per_topic: dict[str, dict[str, float]]
    aggregate: dict[str, float]
    ignored_topics: tuple[str, ...] = ()

    @property
    def evaluated_topic_count(self) -> int:
        return len(self.per_topic)

    @property
    def map(self) -> float:
        return self.aggregate["map"]

    def ap(self) -> dict[str, float]:
        return {t: m["map"] for t, m in self.per_topic.items()}


def group_run(run: Iterable[RunEntry]) -> dict[str, list[str]]:
    """Per-topic pmid rankings, ordered by score desc then pmid asc."""
    by_topic: dict[str, list[RunEntry]] = defaultdict(list)
    for e in run:
        by_topic[e.topic_id].append(e)
    return {t: [e.pmid for e in sorted(es, key=lambda e: (-e.score, pmid_key(e.pmid)))]
            for t, es in by_topic.items()}


def evaluate(run: Iterable[RunEntry], qrels: Qrels) -> MetricReport:
    rankings = group_run(run)
    ignored = tuple(sorted(t for t in rankings if t not in {t for t, _ in qrels.judgments}))
    if ignored:
        log.warning("ignoring %d run topic(s) absent from qrels", len(ignored))
    per_topic = {}
    for topic in qrels.topics:
        if qrels.num_relevant(topic) == 0:
            continue
        per_topic[topic] = topic_metrics(rankings.get(topic, []), qrels, topic)
    n = len(per_topic)
    aggregate = {name: (sum(m[name] for m in per_topic.values()) / n if n else 0.0)
                 for name in METRICS}
    return MetricReport(per_topic, aggregate, ignored)


def format_trec(report: MetricReport, per_topic: bool = True) -> str:
    """trec_eval-style text: ``metric<TAB>topic<TAB>value``."""
    lines = []
    if per_topic:
        for topic in sorted(report.per_topic):
            for name in METRICS:
                lines.append(f"{name:<22}\t{topic}\t{report.per_topic[topic][name]:.4f}")
    lines.append(f"{'num_q':<22}\tall\t{report.evaluated_topic_count}")
    for name in METRICS:
        lines.append(f"{name:<22}\tall\t{report.aggregate[name]:.4f}")
    return "\n".join(lines) + "\n"


def format_csv(report: MetricReport, per_topic: bool = True) -> str:
    lines = ["metric,topic,value"]
    if per_topic:
        for topic in sorted(report.per_topic):
            for name in METRICS:
                lines.append(f"{name},{topic},{report.per_topic[topic][name]:.4f}")
    for name in METRICS:
        lines.append(f"{name},all,{report.aggregate[name]:.4f}")
    return "\n".join(lines) + "\n"
