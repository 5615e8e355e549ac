"""CLEF TAR topic files and the five query variants built from them.

``title``         whitespace-split review title
``query``         Ovid Boolean query flattened to a bag of raw tokens
``title&query``   title tokens followed by query tokens
``query2``        flattened query with explosion, field qualifiers and
                  Ovid truncation symbols cleaned up
``title&query2``  title tokens followed by query2 tokens
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path

VARIANTS = ("title", "query", "title&query", "query2", "title&query2")

_HEADER_RE = re.compile(r"^(Topic|Title|Query|Pids):\s*(.*)$")
_LINE_NO_RE = re.compile(r"^\s*(?:\d+\.|#\d+)\s*")
_SPLIT_RE = re.compile(r"[\s()]+")
_OPERATORS = frozenset({"and", "or", "not"})
_REF_RE = re.compile(r"^(?:(?:and|or|not)/)?#?[\d,\-]*\d[\d,\-]*$", re.IGNORECASE)

QUALIFIER_SUFFIXES = (".ti,ab.", ".ti.", ".ab.", ".mp.", ".sh.", ".pt.", ".tw.",
                      "[tiab]", "[ti]", "[ab]", "[mh]", "[pt]", "[tw]")
_TRUNC_RE = re.compile(r"\$\d*|[?#]")


class TopicFormatError(ValueError):
    def __init__(self, section: str, message: str | None = None):
        self.section = section
        super().__init__(message or f"topic file has no {section} section")


@dataclass(frozen=True)
class Topic:
    topic_id: str
    title: str
    boolean_query: tuple[str, ...]
    pids: tuple[str, ...] = ()


@dataclass(frozen=True)
class Query:
    topic_id: str
    variant: str
    terms: tuple[str, ...]


def parse_topic_file(text: str) -> Topic:
    found: dict[str, list[str]] = {}
    current = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        m = _HEADER_RE.match(line)
        if m:
            current = m.group(1)
            found[current] = [m.group(2).strip()] if m.group(2).strip() else []
            continue
        if current in ("Query", "Pids"):
            found[current].append(line)
        elif current == "Title":
            # wrapped titles continue on the next line
            found["Title"].append(line)
    for section in ("Topic", "Title", "Query"):
        if not found.get(section):
            raise TopicFormatError(section)
    return Topic(
        topic_id=found["Topic"][0],
        title=" ".join(found["Title"]),
        boolean_query=tuple(found["Query"]),
        pids=tuple(found.get("Pids", ())),
    )


def read_topic(path: str | os.PathLike) -> Topic:
    return parse_topic_file(Path(path).read_text(encoding="utf-8"))


def read_topics(directory: str | os.PathLike) -> list[Topic]:
    """All topic files in ``directory``, in filename order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"topics directory not found: {directory}")
    files = sorted(p for p in directory.iterdir() if p.is_file() and not p.name.startswith("."))
    return [read_topic(p) for p in files]


def _is_reference(token: str) -> bool:
    return token.lower() in _OPERATORS or bool(_REF_RE.match(token))


def flatten_query(lines) -> list[str]:
    """Bag of raw tokens from Ovid query lines, syntax residue kept verbatim."""
    terms = []
    for line in lines:
        tokens = [t for t in _SPLIT_RE.split(_LINE_NO_RE.sub("", line, count=1)) if t]
        if all(_is_reference(t) for t in tokens):
            continue
        terms.extend(t for t in tokens if not _is_reference(t))
    return terms


def _strip_syntax(token: str) -> str:
    while True:
        before = token
        token = token.rstrip("/")
        low = token.lower()
        for suffix in QUALIFIER_SUFFIXES:
            if low.endswith(suffix):
                token = token[:-len(suffix)]
                break
        if token == before:
            return token


def clean_query2(lines) -> list[str]:
    out = []
    for token in flatten_query(lines):
        token = _strip_syntax(token)
        token = re.sub(r"\*+", "*", _TRUNC_RE.sub("*", token))
        if token and token.lower() != "exp":
            out.append(token)
    return out


def make_query(topic: Topic, variant: str) -> Query:
    if variant == "title":
        terms = topic.title.split()
    elif variant == "query":
        terms = flatten_query(topic.boolean_query)
    elif variant == "title&query":
        terms = topic.title.split() + flatten_query(topic.boolean_query)
    elif variant == "query2":
        terms = clean_query2(topic.boolean_query)
    elif variant == "title&query2":
        terms = topic.title.split() + clean_query2(topic.boolean_query)
    else:
        raise ValueError(f"unknown query variant {variant!r}; expected one of {', '.join(VARIANTS)}")
    return Query(topic.topic_id, variant, tuple(terms))
