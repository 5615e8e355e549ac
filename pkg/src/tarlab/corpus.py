"""Streaming reader for PubMed/MEDLINE citation XML.

Only the fields used by the indexing schemata are extracted. Records are
produced one at a time: the parser keeps a single ``PubmedArticle`` subtree
in memory, so very large baseline files can be read with constant memory.
"""

from __future__ import annotations

import gzip
import io
import os
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator
from xml.parsers import expat

FIELDS = ("title", "abstract", "pmid", "authors", "journal", "year", "mhl", "mta")

_CHUNK = 1 << 16
_YEAR_RE = re.compile(r"\d{4}")


class CorpusError(ValueError):
    """A citation file could not be turned into documents.

    ``record`` is the 0-based position of the offending record in its stream
    and ``offset`` the byte offset where the problem was detected (or where
    the record starts).
    """

    def __init__(self, message: str, *, record: int | None = None,
                 offset: int | None = None, source: str | None = None):
        self.record = record
        self.offset = offset
        self.source = source
        where = []
        if source:
            where.append(source)
        if record is not None:
            where.append(f"record {record}")
        if offset is not None:
            where.append(f"byte {offset}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class MalformedXMLError(CorpusError):
    pass


class MissingPMIDError(CorpusError):
    pass


@dataclass(frozen=True)
class PubMedDocument:
    pmid: str
    title: str = ""
    abstract: str = ""
    authors: tuple[str, ...] = ()
    journal_title: str = ""
    year: int | None = None
    mesh_headings: tuple[str, ...] = ()
    medline_ta: str = ""

    def __post_init__(self):
        if not self.pmid or not self.pmid.isdigit():
            raise ValueError(f"pmid must be a non-empty digit string, got {self.pmid!r}")
        # accept lists from callers but store tuples
        object.__setattr__(self, "authors", tuple(self.authors))
        object.__setattr__(self, "mesh_headings", tuple(self.mesh_headings))


def field_text(doc: PubMedDocument, field: str) -> str:
    """Render one schema field of ``doc`` as a single string."""
    if field == "title":
        return doc.title
    if field == "abstract":
        return doc.abstract
    if field == "pmid":
        return doc.pmid
    if field == "authors":
        return " ".join(doc.authors)
    if field == "journal":
        return doc.journal_title
    if field == "year":
        return "" if doc.year is None else str(doc.year)
    if field == "mhl":
        return " ".join(doc.mesh_headings)
    if field == "mta":
        return doc.medline_ta
    raise KeyError(f"unknown field {field!r}; expected one of {', '.join(FIELDS)}")


def _text(elem: ET.Element | None) -> str:
    if elem is None:
        return ""
    return " ".join("".join(elem.itertext()).split())


def _author_name(author: ET.Element) -> str:
    last = _text(author.find("LastName"))
    if last:
        fore = _text(author.find("ForeName")) or _text(author.find("Initials"))
        return f"{last} {fore}" if fore else last
    return _text(author.find("CollectiveName"))


def _year(pubdate: ET.Element | None) -> int | None:
    if pubdate is None:
        return None
    year = _text(pubdate.find("Year"))
    if not year:
        year = _text(pubdate.find("MedlineDate"))
    m = _YEAR_RE.search(year)
    return int(m.group()) if m else None


def _mesh(citation: ET.Element) -> list[str]:
    out = []
    for heading in citation.iterfind("MeshHeadingList/MeshHeading"):
        descriptor = _text(heading.find("DescriptorName"))
        if descriptor:
            out.append(descriptor)
        for qualifier in heading.iterfind("QualifierName"):
            q = _text(qualifier)
            if q:
                out.append(q)
    return out


def element_to_document(article: ET.Element) -> PubMedDocument:
    """Map a ``PubmedArticle`` element onto a :class:`PubMedDocument`.

    Raises ``ValueError`` when the PMID is missing or not numeric.
    """
    citation = article.find("MedlineCitation")
    if citation is None:
        raise ValueError("record has no MedlineCitation")
    pmid = _text(citation.find("PMID"))
    if not pmid.isdigit():
        raise ValueError(f"record has no usable PMID ({pmid!r})")
    art = citation.find("Article")
    if art is None:
        art = ET.Element("Article")
    abstract = " ".join(t for t in (_text(a) for a in art.iterfind("Abstract/AbstractText")) if t)
    return PubMedDocument(
        pmid=pmid,
        title=_text(art.find("ArticleTitle")),
        abstract=abstract,
        authors=tuple(n for n in (_author_name(a) for a in art.iterfind("AuthorList/Author")) if n),
        journal_title=_text(art.find("Journal/Title")),
        year=_year(art.find("Journal/JournalIssue/PubDate")),
        mesh_headings=tuple(_mesh(citation)),
        medline_ta=_text(citation.find("MedlineJournalInfo/MedlineTA")),
    )


class _ArticleCollector:
    """expat handlers that build one ``PubmedArticle`` subtree at a time."""

    def __init__(self, parser):
        self.parser = parser
        self.builder: ET.TreeBuilder | None = None
        self.depth = 0
        self.start_offset = 0
        self.done: list[tuple[ET.Element, int]] = []

    def start(self, tag, attrs):
        if self.builder is None:
            if tag != "PubmedArticle":
                return
            self.builder = ET.TreeBuilder()
            self.start_offset = self.parser.CurrentByteIndex
        self.depth += 1
        self.builder.start(tag, attrs)

    def end(self, tag):
        if self.builder is None:
            return
        self.builder.end(tag)
        self.depth -= 1
        if self.depth == 0:
            self.done.append((self.builder.close(), self.start_offset))
            self.builder = None

    def data(self, text):
        if self.builder is not None:
            self.builder.data(text)


def iter_pubmed_xml(stream: BinaryIO | bytes, source: str | None = None) -> Iterator[PubMedDocument]:
    """Yield documents from a PubmedArticleSet (or a lone PubmedArticle).

    Missing optional elements become empty values. Malformed XML raises
    :class:`MalformedXMLError` with the failing byte offset; a record without
    a numeric PMID raises :class:`MissingPMIDError` with its position.
    """
    if isinstance(stream, (bytes, bytearray)):
        stream = io.BytesIO(stream)
    parser = expat.ParserCreate()
    parser.buffer_text = True
    collector = _ArticleCollector(parser)
    parser.StartElementHandler = collector.start
    parser.EndElementHandler = collector.end
    parser.CharacterDataHandler = collector.data
    n = 0

    def drain():
        nonlocal n
        for elem, offset in collector.done:
            try:
                doc = element_to_document(elem)
            except ValueError as exc:
                raise MissingPMIDError(str(exc), record=n, offset=offset, source=source) from None
            n += 1
            yield doc
        collector.done.clear()

    while True:
        chunk = stream.read(_CHUNK)
        try:
            parser.Parse(chunk, not chunk)
        except expat.ExpatError as exc:
            # records completed before the error are still valid
            yield from drain()
            raise MalformedXMLError(
                f"malformed XML: {expat.ErrorString(exc.code)}",
                record=n, offset=parser.ErrorByteIndex, source=source,
            ) from None
        yield from drain()
        if not chunk:
            break


def parse_pubmed_xml(stream: BinaryIO | bytes, source: str | None = None) -> list[PubMedDocument]:
    return list(iter_pubmed_xml(stream, source))


def open_citation_file(path: str | os.PathLike) -> BinaryIO:
    """Open a citation file, transparently un-gzipping it."""
    f = open(path, "rb")
    magic = f.read(2)
    f.seek(0)
    if magic == b"\x1f\x8b":
        return gzip.GzipFile(fileobj=f)
    return f


def corpus_files(path: str | os.PathLike) -> list[Path]:
    """Citation files under ``path`` (recursive), sorted for determinism."""
    path = Path(path)
    if path.is_file():
        return [path]
    if not path.is_dir():
        raise FileNotFoundError(f"corpus path does not exist: {path}")
    files = [p for p in path.rglob("*")
             if p.is_file() and (p.name.endswith(".xml") or p.name.endswith(".xml.gz"))]
    return sorted(files, key=lambda p: p.relative_to(path).as_posix())


def iter_corpus(path: str | os.PathLike) -> Iterator[PubMedDocument]:
    for file in corpus_files(path):
        with open_citation_file(file) as f:
            yield from iter_pubmed_xml(f, source=str(file))


def write_pubmed_xml(docs: Iterable[PubMedDocument], stream: BinaryIO) -> None:
    """Serialize documents as a minimal PubmedArticleSet.

    Authors and MeSH entries are written so that re-parsing yields the same
    rendered strings (authors as CollectiveName, each MeSH entry as its own
    descriptor).
    """
    stream.write(b'<?xml version="1.0" encoding="UTF-8"?>\n<PubmedArticleSet>\n')
    for doc in docs:
        article = ET.Element("PubmedArticle")
        citation = ET.SubElement(article, "MedlineCitation")
        ET.SubElement(citation, "PMID").text = doc.pmid
        art = ET.SubElement(citation, "Article")
        journal = ET.SubElement(art, "Journal")
        issue = ET.SubElement(journal, "JournalIssue")
        pubdate = ET.SubElement(issue, "PubDate")
        if doc.year is not None:
            ET.SubElement(pubdate, "Year").text = str(doc.year)
        if doc.journal_title:
            ET.SubElement(journal, "Title").text = doc.journal_title
        ET.SubElement(art, "ArticleTitle").text = doc.title
        if doc.abstract:
            ET.SubElement(ET.SubElement(art, "Abstract"), "AbstractText").text = doc.abstract
        if doc.authors:
            authors = ET.SubElement(art, "AuthorList")
            for name in doc.authors:
                ET.SubElement(ET.SubElement(authors, "Author"), "CollectiveName").text = name
        info = ET.SubElement(citation, "MedlineJournalInfo")
        if doc.medline_ta:
            ET.SubElement(info, "MedlineTA").text = doc.medline_ta
        if doc.mesh_headings:
            mesh = ET.SubElement(citation, "MeshHeadingList")
            for term in doc.mesh_headings:
                ET.SubElement(ET.SubElement(mesh, "MeshHeading"), "DescriptorName").text = term
        stream.write(ET.tostring(article, encoding="utf-8"))
        stream.write(b"\n")
    stream.write(b"</PubmedArticleSet>\n")
