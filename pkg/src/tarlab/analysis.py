"""Token pipeline shared by indexing and querying.

The chain is: tokenize, pattern replacement, word delimiter, lowercase,
stop-word removal, Porter stemming. An :class:`AnalysisChain` is stored in
every index's metadata, so a query is always analyzed the way its index was.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .porter import porter_stem

STAGES = ("tokenize", "pattern_replace", "word_delimiter", "lowercase", "stop", "porter")

# the classic 33-word English list used as the default by Lucene analyzers
DEFAULT_STOPWORDS = frozenset("""
a an and are as at be but by for if in into is it no not of on or such
that the their then there these they this to was will with
""".split())

# "'s" at token end, then any character that is not alphanumeric or an internal . - _
DEFAULT_PATTERN = r"'[sS]$|[^\w.\-]|^[._\-]+|[._\-]+$"

_TOKEN_RE = re.compile(r"[^\W_]+(?:[.\-_'][^\W_]+)*")
_DELIMS = ".-_'"


@dataclass(frozen=True)
class AnalysisChain:
    stages: tuple[str, ...] = STAGES
    stopwords: frozenset[str] = DEFAULT_STOPWORDS
    pattern: str = DEFAULT_PATTERN
    replacement: str = ""
    generate_word_parts: bool = True
    preserve_original: bool = True

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        object.__setattr__(self, "stopwords", frozenset(self.stopwords))
        unknown = [s for s in self.stages if s not in STAGES]
        if unknown:
            raise ValueError(f"unknown analysis stage(s): {unknown}")
        if list(self.stages) != [s for s in STAGES if s in self.stages]:
            raise ValueError(f"stages must follow the order {', '.join(STAGES)}")
        if any(w != w.lower() for w in self.stopwords):
            raise ValueError("stopwords must be lowercase")

    def to_dict(self) -> dict[str, str]:
        """Flat string form, written into index metadata."""
        return {
            "chain.stages": ",".join(self.stages),
            "chain.stopwords": ",".join(sorted(self.stopwords)),
            "chain.pattern": self.pattern,
            "chain.replacement": self.replacement,
            "chain.generate_word_parts": str(self.generate_word_parts).lower(),
            "chain.preserve_original": str(self.preserve_original).lower(),
        }

    @classmethod
    def from_dict(cls, d: dict[str, str]) -> AnalysisChain:
        def split(v):
            return tuple(x for x in v.split(",") if x)

        return cls(
            stages=split(d["chain.stages"]),
            stopwords=frozenset(split(d["chain.stopwords"])),
            pattern=d["chain.pattern"],
            replacement=d["chain.replacement"],
            generate_word_parts=d["chain.generate_word_parts"] == "true",
            preserve_original=d["chain.preserve_original"] == "true",
        )

    def analyze(self, text: str) -> list[str]:
        return analyze(text, self)


DEFAULT_CHAIN = AnalysisChain()


def tokenize(text: str) -> list[str]:
    """Runs of letters/digits; '.', '-', '_' and "'" survive only between them."""
    return _TOKEN_RE.findall(text)


def _char_class(ch: str) -> str:
    if ch.isdigit():
        return "digit"
    if ch.isupper():
        return "upper"
    if ch.isalpha():
        return "lower"
    return "other"


def _split_parts(token: str) -> list[str]:
    parts: list[str] = []
    cur = ""
    prev = None
    for ch in token:
        if ch in _DELIMS:
            if cur:
                parts.append(cur)
            cur, prev = "", None
            continue
        kind = _char_class(ch)
        if cur and prev is not None and (
            (prev == "digit") != (kind == "digit") or (prev == "lower" and kind == "upper")
        ):
            parts.append(cur)
            cur = ""
        cur += ch
        prev = kind
    if cur:
        parts.append(cur)
    return parts


def word_delimit(token: str, generate_word_parts: bool = True,
                 preserve_original: bool = True) -> list[str]:
    """Split on intra-word delimiters, letter/digit and lower/upper transitions."""
    parts = _split_parts(token)
    if parts == [token]:
        return [token]
    out = [token] if preserve_original else []
    if generate_word_parts:
        out.extend(parts)
    return out


def analyze(text: str, chain: AnalysisChain = DEFAULT_CHAIN) -> list[str]:
    stages = chain.stages
    tokens = tokenize(text) if "tokenize" in stages else text.split()
    if "pattern_replace" in stages:
        rx = _compiled(chain.pattern)
        tokens = [t for t in (rx.sub(chain.replacement, t) for t in tokens) if t]
    if "word_delimiter" in stages:
        tokens = [p for t in tokens
                  for p in word_delimit(t, chain.generate_word_parts, chain.preserve_original)]
    if "lowercase" in stages:
        tokens = [t.lower() for t in tokens]
    if "stop" in stages:
        tokens = [t for t in tokens if t not in chain.stopwords]
    if "porter" in stages:
        # a lone "s" stems to nothing
        tokens = [t for t in map(porter_stem, tokens) if t]
        if "stop" in stages:
            # "thes" -> "the", "ins" -> "in"
            tokens = [t for t in tokens if t not in chain.stopwords]
    return tokens


_RX_CACHE: dict[str, re.Pattern] = {}


def _compiled(pattern: str) -> re.Pattern:
    rx = _RX_CACHE.get(pattern)
    if rx is None:
        rx = _RX_CACHE[pattern] = re.compile(pattern)
    return rx
