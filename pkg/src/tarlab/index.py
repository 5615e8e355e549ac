"""Inverted indexes over PubMed documents under a field schema.

Each document is indexed as one catch-all field: the schema's fields are
rendered, joined with single spaces and analyzed. Postings hold
``(docid, tf)`` pairs with docids assigned in corpus order.
"""

from __future__ import annotations

import bisect
import hashlib
import os
from array import array
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .analysis import DEFAULT_CHAIN, AnalysisChain, analyze
from .corpus import FIELDS, PubMedDocument, field_text

FORMAT_VERSION = "1"
INDEX_FILES = ("meta", "docs", "postings")
PREFIX_CAP = 128

_BASE = ("title", "abstract", "pmid")
_AJY = _BASE + ("authors", "journal", "year")
SCHEMATA = {
    "baseline": _BASE,
    "1+AJY": _AJY,
    "2+MHL": _AJY + ("mhl",),
    "2+MTA": _AJY + ("mta",),
    "2+MHLMTA": _AJY + ("mhl", "mta"),
}


@dataclass(frozen=True)
class FieldSchema:
    id: str
    fields: tuple[str, ...]

    @classmethod
    def named(cls, schema_id: str) -> FieldSchema:
        try:
            return cls(schema_id, SCHEMATA[schema_id])
        except KeyError:
            raise KeyError(f"unknown schema {schema_id!r}; expected one of "
                           f"{', '.join(SCHEMATA)}") from None

    def __post_init__(self):
        bad = [f for f in self.fields if f not in FIELDS]
        if bad:
            raise ValueError(f"unknown field(s) in schema {self.id}: {bad}")

    def document_text(self, doc: PubMedDocument) -> str:
        return " ".join(field_text(doc, f) for f in self.fields)


class IndexBuildError(ValueError):
    pass


class IndexStoreError(Exception):
    """Base class for problems reading an index directory."""


class IndexMissingError(IndexStoreError, FileNotFoundError):
    pass


class IndexVersionError(IndexStoreError):
    pass


class IndexChecksumError(IndexStoreError):
    pass


class IndexFormatError(IndexStoreError):
    pass


class Index:
    """Read-only inverted index.

    ``postings_map`` maps each term to a pair of int64 arrays
    ``(docids, tfs)`` with strictly ascending docids.
    """

    def __init__(self, schema: FieldSchema, chain: AnalysisChain, pmids: list[str],
                 doc_lengths, postings_map: dict[str, tuple[np.ndarray, np.ndarray]]):
        self.schema = schema
        self.chain = chain
        self.pmids = list(pmids)
        self.doc_lengths = np.asarray(doc_lengths, dtype=np.int64)
        self.postings_map = postings_map
        self.total_terms = int(self.doc_lengths.sum())
        self._sorted_terms: list[str] | None = None

    @property
    def N(self) -> int:
        return len(self.pmids)

    @property
    def avgdl(self) -> float:
        return self.total_terms / self.N if self.N else 0.0

    @property
    def sorted_terms(self) -> list[str]:
        if self._sorted_terms is None:
            self._sorted_terms = sorted(self.postings_map)
        return self._sorted_terms

    def __len__(self):
        return self.N

    def __contains__(self, term: str) -> bool:
        return term in self.postings_map

    def df(self, term: str) -> int:
        entry = self.postings_map.get(term)
        return 0 if entry is None else len(entry[0])

    def postings(self, term: str) -> list[tuple[int, int]]:
        entry = self.postings_map.get(term)
        if entry is None:
            return []
        return list(zip(entry[0].tolist(), entry[1].tolist()))

    def iter_prefix(self, prefix: str):
        terms = self.sorted_terms
        i = bisect.bisect_left(terms, prefix)
        while i < len(terms) and terms[i].startswith(prefix):
            yield terms[i]
            i += 1

    def expand_prefix(self, prefix: str, limit: int = PREFIX_CAP) -> list[str]:
        if not prefix:
            raise ValueError("prefix must be non-empty")
        out = []
        for term in self.iter_prefix(prefix):
            if len(out) == limit:
                break
            out.append(term)
        return out

    def __eq__(self, other):
        if not isinstance(other, Index):
            return NotImplemented
        if (self.schema, self.chain, self.pmids) != (other.schema, other.chain, other.pmids):
            return False
        if not np.array_equal(self.doc_lengths, other.doc_lengths):
            return False
        if self.postings_map.keys() != other.postings_map.keys():
            return False
        return all(np.array_equal(d, other.postings_map[t][0])
                   and np.array_equal(f, other.postings_map[t][1])
                   for t, (d, f) in self.postings_map.items())

    def __repr__(self):
        return (f"Index(schema={self.schema.id!r}, N={self.N}, terms={len(self.postings_map)}, "
                f"avgdl={self.avgdl:.3f})")


def _analyze_counts(args) -> Counter:
    text, chain = args
    return Counter(analyze(text, chain))


def build_index(corpus: Iterable[PubMedDocument], schema: FieldSchema | str,
                chain: AnalysisChain = DEFAULT_CHAIN, jobs: int = 1) -> Index:
    """Index ``corpus`` under ``schema``.

    With ``jobs > 1`` documents are analyzed in worker processes; results
    are consumed in corpus order, so the index does not depend on scheduling.
    """
    if isinstance(schema, str):
        schema = FieldSchema.named(schema)
    pmids: list[str] = []
    seen: set[str] = set()

    def texts():
        for doc in corpus:
            if doc.pmid in seen:
                raise IndexBuildError(f"duplicate pmid {doc.pmid}")
            seen.add(doc.pmid)
            pmids.append(doc.pmid)
            yield schema.document_text(doc), chain

    lengths = array("q")
    acc: dict[str, tuple[array, array]] = {}

    def add(docid: int, counts: Counter):
        lengths.append(sum(counts.values()))
        for term, tf in counts.items():
            entry = acc.get(term)
            if entry is None:
                entry = acc[term] = (array("q"), array("q"))
            entry[0].append(docid)
            entry[1].append(tf)

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for docid, counts in enumerate(pool.map(_analyze_counts, texts(), chunksize=256)):
                add(docid, counts)
    else:
        for docid, item in enumerate(texts()):
            add(docid, _analyze_counts(item))

    if not pmids:
        raise IndexBuildError("cannot build an index from an empty corpus")
    postings_map = {t: (np.frombuffer(d, dtype=np.int64).copy(), np.frombuffer(f, dtype=np.int64).copy())
                    for t, (d, f) in acc.items()}
    return Index(schema, chain, pmids, np.frombuffer(lengths, dtype=np.int64).copy(), postings_map)


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _meta_lines(index: Index) -> list[tuple[str, str]]:
    items = [
        ("format_version", FORMAT_VERSION),
        ("schema", index.schema.id),
        ("fields", ",".join(index.schema.fields)),
        *index.chain.to_dict().items(),
        ("N", str(index.N)),
        ("total_terms", str(index.total_terms)),
        ("avgdl", repr(index.avgdl)),
    ]
    for key, value in items:
        if "\t" in value or "\n" in value:
            raise IndexBuildError(f"metadata value for {key} contains a tab or newline")
    return items


def serialize_index(index: Index) -> dict[str, bytes]:
    """File name -> contents for the on-disk layout (without checksums)."""
    meta = "".join(f"{k}\t{v}\n" for k, v in _meta_lines(index))
    docs = "".join(f"{i}\t{pmid}\t{n}\n"
                   for i, (pmid, n) in enumerate(zip(index.pmids, index.doc_lengths.tolist())))
    lines = []
    for term in index.sorted_terms:
        d, f = index.postings_map[term]
        pairs = ",".join(f"{a}:{b}" for a, b in zip(d.tolist(), f.tolist()))
        lines.append(f"{term}\t{len(d)}\t{pairs}\n")
    return {
        "meta": meta.encode("utf-8"),
        "docs": docs.encode("utf-8"),
        "postings": "".join(lines).encode("utf-8"),
    }


def write_index(index: Index, directory: str | os.PathLike) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    files = serialize_index(index)
    for name, data in files.items():
        (directory / name).write_bytes(data)
    sums = "".join(f"{name}\t{_sha256(files[name])}\n" for name in INDEX_FILES)
    (directory / "checksums").write_bytes(sums.encode("utf-8"))
    return directory


def _read_files(directory: Path) -> dict[str, bytes]:
    if not directory.is_dir():
        raise IndexMissingError(f"index directory not found: {directory}")
    files = {}
    for name in INDEX_FILES + ("checksums",):
        path = directory / name
        if not path.is_file():
            raise IndexMissingError(f"index file missing: {path}")
        files[name] = path.read_bytes()
    expected = {}
    for line in files["checksums"].decode("utf-8").splitlines():
        name, _, digest = line.partition("\t")
        expected[name] = digest
    for name in INDEX_FILES:
        if expected.get(name) != _sha256(files[name]):
            raise IndexChecksumError(f"checksum mismatch for {directory / name}")
    return files


def read_index(directory: str | os.PathLike) -> Index:
    directory = Path(directory)
    files = _read_files(directory)
    meta = dict(line.split("\t", 1) for line in files["meta"].decode("utf-8").splitlines())
    if meta.get("format_version") != FORMAT_VERSION:
        raise IndexVersionError(f"index format version {meta.get('format_version')!r} "
                                f"is not supported (expected {FORMAT_VERSION})")
    schema = FieldSchema(meta["schema"], tuple(x for x in meta["fields"].split(",") if x))
    chain = AnalysisChain.from_dict(meta)

    pmids, lengths = [], []
    for i, line in enumerate(files["docs"].decode("utf-8").splitlines()):
        docid, pmid, n = line.split("\t")
        if int(docid) != i:
            raise IndexFormatError(f"docs line {i + 1}: docid {docid} out of sequence")
        pmids.append(pmid)
        lengths.append(int(n))

    postings_map = {}
    for lineno, line in enumerate(files["postings"].decode("utf-8").splitlines(), 1):
        term, df, pairs = line.split("\t")
        flat = np.array([int(x) for p in pairs.split(",") for x in p.split(":")], dtype=np.int64)
        docids, tfs = flat[0::2].copy(), flat[1::2].copy()
        if len(docids) != int(df):
            raise IndexFormatError(f"postings line {lineno}: df {df} != {len(docids)} entries")
        postings_map[term] = (docids, tfs)

    index = Index(schema, chain, pmids, lengths, postings_map)
    if index.N != int(meta["N"]) or index.total_terms != int(meta["total_terms"]):
        raise IndexFormatError(f"collection statistics in {directory / 'meta'} do not match docs")
    return index
