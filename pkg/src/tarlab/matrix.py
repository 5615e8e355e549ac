"""Comparison matrices of MAP values with significance markers.

Rows are query variants or swept parameter values, columns are schemata.
Cells render as ``"0.1197"`` or ``"0.1197 ++"``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .metrics import MetricReport
from .stats import compare_to_baseline

FORMATS = ("csv", "markdown", "plotdata")
_MARKERS = ("", "*", "+", "++")


@dataclass(frozen=True)
class Cell:
    value: float
    marker: str = ""
    text: str | None = None  # verbatim value text for ingested matrices

    def render(self) -> str:
        value = self.text if self.text is not None else f"{self.value:.4f}"
        return f"{value} {self.marker}" if self.marker else value


@dataclass
class ComparisonMatrix:
    rows: list[str]
    columns: list[str]
    cells: dict[tuple[str, str], Cell]
    row_header: str = "query_parser"
    title: str = ""
    significance: dict = field(default_factory=dict)

    def __post_init__(self):
        missing = [(r, c) for r in self.rows for c in self.columns if (r, c) not in self.cells]
        if missing:
            raise ValueError(f"matrix is not rectangular; missing cell(s) {missing[:5]}")

    def __getitem__(self, key: tuple[str, str]) -> Cell:
        return self.cells[key]


class MissingCellError(KeyError):
    pass


def build_matrix(reports: Mapping[tuple[str, str], MetricReport], rows: Sequence[str],
                 columns: Sequence[str], baseline: str | None = "baseline",
                 row_header: str = "query_parser", title: str = "") -> ComparisonMatrix:
    """MAP matrix; non-baseline cells marked by a paired t-test on per-topic AP
    against the baseline column of the same row."""
    for r in rows:
        for c in columns:
            if (r, c) not in reports:
                raise MissingCellError(f"no report for cell (row={r!r}, column={c!r})")
    cells = {}
    significance = {}
    for r in rows:
        tests = {}
        if baseline in columns and len(columns) > 1:
            per_topic = {c: reports[r, c].ap() for c in columns}
            if len(per_topic[baseline]) >= 2:
                tests = compare_to_baseline(per_topic, baseline)
        for c in columns:
            test = tests.get(c)
            cells[r, c] = Cell(reports[r, c].map, test.marker if test else "")
            if test:
                significance[r, c] = test
    return ComparisonMatrix(list(rows), list(columns), cells, row_header, title, significance)


def to_csv(matrix: ComparisonMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([matrix.row_header, *matrix.columns])
    for r in matrix.rows:
        w.writerow([r, *(matrix.cells[r, c].render() for c in matrix.columns)])
    return buf.getvalue()


def to_markdown(matrix: ComparisonMatrix) -> str:
    lines = []
    if matrix.title:
        lines += [f"**{matrix.title}**", ""]
    lines.append("| " + " | ".join([matrix.row_header, *matrix.columns]) + " |")
    lines.append("|" + "|".join(["---"] + ["---:"] * len(matrix.columns)) + "|")
    for r in matrix.rows:
        lines.append("| " + " | ".join([r, *(matrix.cells[r, c].render() for c in matrix.columns)]) + " |")
    return "\n".join(lines) + "\n"


def to_plotdata(matrix: ComparisonMatrix) -> str:
    """Long form (row_label, column_label, value): one series per column."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row_label", "column_label", "value"])
    for c in matrix.columns:
        for r in matrix.rows:
            cell = matrix.cells[r, c]
            w.writerow([r, c, cell.text if cell.text is not None else f"{cell.value:.4f}"])
    return buf.getvalue()


def emit(matrix: ComparisonMatrix, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(matrix)
    if fmt == "markdown":
        return to_markdown(matrix)
    if fmt == "plotdata":
        return to_plotdata(matrix)
    raise ValueError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")


def _parse_cell(text: str) -> Cell:
    parts = text.split()
    if not parts or len(parts) > 2:
        raise ValueError(f"bad matrix cell {text!r}")
    marker = parts[1] if len(parts) == 2 else ""
    if marker not in _MARKERS:
        raise ValueError(f"bad significance marker {marker!r} in cell {text!r}")
    return Cell(float(parts[0]), marker, parts[0])


def read_matrix_csv(text: str, title: str = "") -> ComparisonMatrix:
    """Ingest an externally produced matrix (e.g. published MAP tables)."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows:
        raise ValueError("empty matrix csv")
    header, body = rows[0], rows[1:]
    columns = header[1:]
    cells = {}
    labels = []
    for lineno, row in enumerate(body, 2):
        if len(row) != len(header):
            raise ValueError(f"line {lineno}: expected {len(header)} cells, got {len(row)}")
        labels.append(row[0])
        for c, value in zip(columns, row[1:]):
            cells[row[0], c] = _parse_cell(value)
    return ComparisonMatrix(labels, columns, cells, header[0], title)
