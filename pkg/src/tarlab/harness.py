"""Batch experiment steps: index, run, sweep, eval, ttest, report.

Every step reads an :class:`~tarlab.config.ExperimentConfig` and writes
under ``output_dir``:

    runs/<tag>.<schema>.<variant>[.<axis><value>].run
    reports/<run name>.eval   trec_eval-style text
    reports/<run name>.csv
    ttest.csv
    tables/<table>.{csv,md,plot.csv}
"""

from __future__ import annotations

import logging
import re
import shutil
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from . import matrix as mx
from .bm25 import read_run, run_queries, sweep, write_run
from .config import ConfigError, ExperimentConfig
from .corpus import iter_corpus
from .index import SCHEMATA, build_index, read_index, write_index
from .metrics import MetricReport, Qrels, evaluate, format_csv, format_trec, read_qrels
from .stats import compare_to_baseline
from .topics import VARIANTS, make_query, read_topics
from .util import atomic_write_text

log = logging.getLogger(__name__)


class DataError(Exception):
    """Input data is missing or inconsistent (exit code 2)."""


def format_value(v: float) -> str:
    return repr(float(v))


_SCHEMA_RX = "|".join(re.escape(s) for s in sorted(SCHEMATA, key=len, reverse=True))
_VARIANT_RX = "|".join(re.escape(v) for v in sorted(VARIANTS, key=len, reverse=True))
_RUN_NAME_RE = re.compile(
    rf"^(?P<tag>[^.]+)\.(?P<schema>{_SCHEMA_RX})\.(?P<variant>{_VARIANT_RX})"
    rf"(?:\.(?P<axis>k1|b)(?P<value>\d+(?:\.\d+)?))?\.run$"
)


@dataclass(frozen=True)
class RunCell:
    tag: str
    schema: str
    variant: str
    axis: str | None = None
    value: float | None = None

    @property
    def filename(self) -> str:
        name = f"{self.tag}.{self.schema}.{self.variant}"
        if self.axis is not None:
            name += f".{self.axis}{format_value(self.value)}"
        return name + ".run"

    @classmethod
    def parse(cls, filename: str) -> RunCell:
        m = _RUN_NAME_RE.match(filename)
        if not m:
            raise ValueError(f"not a run file name: {filename!r}")
        value = m.group("value")
        return cls(m.group("tag"), m.group("schema"), m.group("variant"),
                   m.group("axis"), float(value) if value is not None else None)


def _runs_dir(cfg: ExperimentConfig) -> Path:
    return Path(cfg.output_dir) / "runs"


def cmd_index(cfg: ExperimentConfig, force: bool = False) -> list[Path]:
    """Build one index per configured schema under ``index_dir/<schema>``."""
    cfg.require("corpus_dir")
    if cfg.index_dir is None:
        raise ConfigError("index_dir is not configured")
    index_dir = Path(cfg.index_dir)
    targets = [index_dir / s for s in cfg.schemata]
    existing = [t for t in targets if t.exists()]
    if existing and not force:
        raise ConfigError(f"index already exists: {existing[0]} (use --force to rebuild)")
    index_dir.mkdir(parents=True, exist_ok=True)
    out = []
    for schema, target in zip(cfg.schemata, targets):
        tmp = Path(tempfile.mkdtemp(dir=index_dir, prefix=f".{schema}."))
        try:
            index = build_index(iter_corpus(cfg.corpus_dir), schema, jobs=cfg.jobs)
            write_index(index, tmp)
            if target.exists():
                shutil.rmtree(target)
            tmp.rename(target)
        except BaseException:
            shutil.rmtree(tmp, ignore_errors=True)
            raise
        log.info("indexed %d documents under %s -> %s", index.N, schema, target)
        out.append(target)
    return out


def _load_topics(cfg: ExperimentConfig):
    cfg.require("topics_dir")
    topics = read_topics(cfg.topics_dir)
    if not topics:
        raise DataError(f"no topic files in {cfg.topics_dir}")
    return topics


def _load_index(cfg: ExperimentConfig, schema: str):
    if cfg.index_dir is None:
        raise ConfigError("index_dir is not configured")
    index = read_index(Path(cfg.index_dir) / schema)
    if index.schema.id != schema:
        raise DataError(f"index at {Path(cfg.index_dir) / schema} holds schema {index.schema.id}")
    return index


def cmd_run(cfg: ExperimentConfig) -> list[Path]:
    """One run file per (schema, variant) at the configured parameters."""
    topics = _load_topics(cfg)
    out = []
    for schema in cfg.schemata:
        index = _load_index(cfg, schema)
        for variant in cfg.variants:
            queries = [make_query(t, variant) for t in topics]
            entries = run_queries(index, queries, cfg.params, cfg.cutoff, cfg.tag)
            out.append(write_run(entries, _runs_dir(cfg) / RunCell(cfg.tag, schema, variant).filename))
    return out


def cmd_sweep(cfg: ExperimentConfig) -> list[Path]:
    """One run file per (schema, variant, swept value)."""
    if cfg.sweep_axis is None or not cfg.sweep_values:
        raise ConfigError("sweep needs sweep_axis and sweep_values")
    topics = _load_topics(cfg)
    out = []
    for schema in cfg.schemata:
        index = _load_index(cfg, schema)
        for variant in cfg.variants:
            queries = [make_query(t, variant) for t in topics]
            runs = sweep(index, queries, cfg.sweep_axis, cfg.sweep_values, cfg.params,
                         cfg.cutoff, cfg.tag)
            for value, entries in runs.items():
                cell = RunCell(cfg.tag, schema, variant, cfg.sweep_axis, value)
                out.append(write_run(entries, _runs_dir(cfg) / cell.filename))
    return out


def _load_qrels(cfg: ExperimentConfig) -> Qrels:
    cfg.require("qrels_path")
    return read_qrels(cfg.qrels_path)


def find_runs(cfg: ExperimentConfig) -> list[Path]:
    runs_dir = _runs_dir(cfg)
    if not runs_dir.is_dir():
        return []
    return sorted(p for p in runs_dir.glob("*.run") if _RUN_NAME_RE.match(p.name))


def cmd_eval(cfg: ExperimentConfig, runs: Iterable[Path] | None = None) -> dict[Path, MetricReport]:
    qrels = _load_qrels(cfg)
    runs = sorted(Path(r) for r in runs) if runs else find_runs(cfg)
    if not runs:
        raise DataError(f"no run files to evaluate in {_runs_dir(cfg)}")
    reports_dir = Path(cfg.output_dir) / "reports"
    out = {}
    for path in runs:
        report = evaluate(read_run(path), qrels)
        stem = path.name[:-4] if path.name.endswith(".run") else path.name
        atomic_write_text(reports_dir / f"{stem}.eval", format_trec(report))
        atomic_write_text(reports_dir / f"{stem}.csv", format_csv(report))
        out[path] = report
    return out


def _evaluate_cells(cfg: ExperimentConfig) -> dict[RunCell, MetricReport]:
    qrels = _load_qrels(cfg)
    cells = {}
    for path in find_runs(cfg):
        cell = RunCell.parse(path.name)
        if cell.tag == cfg.tag:
            cells[cell] = evaluate(read_run(path), qrels)
    if not cells:
        raise DataError(f"no run files with tag {cfg.tag!r} in {_runs_dir(cfg)}")
    return cells


def _groups(cells: dict[RunCell, MetricReport]):
    """(variant, axis, value) -> {schema: report}, in a stable order."""
    groups: dict[tuple, dict[str, MetricReport]] = {}
    for cell in sorted(cells, key=lambda c: (VARIANTS.index(c.variant), c.axis or "",
                                             c.value if c.value is not None else -1.0,
                                             list(SCHEMATA).index(c.schema))):
        groups.setdefault((cell.variant, cell.axis, cell.value), {})[cell.schema] = cells[cell]
    return groups


def cmd_ttest(cfg: ExperimentConfig) -> Path:
    """Paired t-tests on per-topic AP of every schema against the baseline schema."""
    cells = _evaluate_cells(cfg)
    lines = ["variant,axis,value,schema,baseline,n,mean_diff,t,df,p,marker"]
    for (variant, axis, value), by_schema in _groups(cells).items():
        if cfg.baseline_schema not in by_schema:
            continue
        per_topic = {s: r.ap() for s, r in by_schema.items()}
        if len(per_topic[cfg.baseline_schema]) < 2:
            continue
        for schema, res in compare_to_baseline(per_topic, cfg.baseline_schema).items():
            lines.append(",".join([
                variant, axis or "", "" if value is None else format_value(value), schema,
                cfg.baseline_schema, str(res.n), f"{res.mean_diff:.6f}", f"{res.t_statistic:.6f}",
                str(res.degrees_freedom), f"{res.p_value:.6g}", res.marker,
            ]))
    return atomic_write_text(Path(cfg.output_dir) / "ttest.csv", "\n".join(lines) + "\n")


def build_tables(cfg: ExperimentConfig) -> dict[str, mx.ComparisonMatrix]:
    """Variant x schema table at default parameters, plus one table per swept variant."""
    cells = _evaluate_cells(cfg)
    schemata = [s for s in SCHEMATA if s in cfg.schemata]
    tables = {}
    default = {(c.variant, c.schema): r for c, r in cells.items() if c.axis is None}
    variants = [v for v in VARIANTS if any(k[0] == v for k in default)]
    if variants:
        tables["variants"] = mx.build_matrix(
            default, variants, schemata, cfg.baseline_schema, "query_parser",
            f"MAP by query parser and schema (k1={cfg.k1}, b={cfg.b})")
    swept = {}
    for c, r in cells.items():
        if c.axis is not None:
            swept.setdefault((c.variant, c.axis), {})[format_value(c.value), c.schema] = r
    for (variant, axis), reports in sorted(swept.items()):
        values = sorted({k[0] for k in reports}, key=float)
        fixed = f"b={cfg.b}" if axis == "k1" else f"k1={cfg.k1}"
        tables[f"sweep_{axis}.{variant}"] = mx.build_matrix(
            reports, values, schemata, cfg.baseline_schema, axis,
            f"MAP sweeping {axis} ({fixed}), parser {variant}")
    return tables


def write_tables(tables: dict[str, mx.ComparisonMatrix], directory: Path) -> list[Path]:
    out = []
    suffix = {"csv": ".csv", "markdown": ".md", "plotdata": ".plot.csv"}
    for name, table in tables.items():
        for fmt in mx.FORMATS:
            out.append(atomic_write_text(Path(directory) / f"{name}{suffix[fmt]}", mx.emit(table, fmt)))
    return out


def cmd_report(cfg: ExperimentConfig) -> list[Path]:
    return write_tables(build_tables(cfg), Path(cfg.output_dir) / "tables")


def run_pipeline(cfg: ExperimentConfig, force: bool = False) -> None:
    """index -> run -> (sweep) -> eval -> ttest -> report."""
    cmd_index(cfg, force=force)
    cmd_run(cfg)
    if cfg.sweep_axis and cfg.sweep_values:
        cmd_sweep(cfg)
    cmd_eval(cfg)
    cmd_ttest(cfg)
    cmd_report(cfg)

