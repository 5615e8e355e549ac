"""Experiment configuration: flat ``key = value`` text files.

Example::

    corpus_dir   = corpus
    index_dir    = out/index
    topics_dir   = topics
    qrels_path   = qrels.txt
    output_dir   = out
    schemata     = baseline, 1+AJY, 2+MHL, 2+MTA, 2+MHLMTA
    variants     = title, query, title&query, query2, title&query2
    k1           = 1.2
    b            = 0.75
    cutoff       = 1000
    tag          = bm25
    sweep_axis   = b
    sweep_values = 0.0:1.0:0.1

Relative paths are resolved against the directory holding the file.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .bm25 import DEFAULT_CUTOFF, BM25Params
from .index import SCHEMATA
from .topics import VARIANTS

PATH_KEYS = ("corpus_dir", "index_dir", "topics_dir", "qrels_path", "output_dir")


class ConfigError(ValueError):
    pass


def parse_values(text: str) -> tuple[float, ...]:
    """``"1.0,1.2,1.4"`` or an inclusive range ``"start:stop:step"``."""
    text = text.strip()
    if ":" in text:
        try:
            start, stop, step = (float(x) for x in text.split(":"))
        except ValueError:
            raise ConfigError(f"bad range {text!r}; expected start:stop:step") from None
        if step <= 0:
            raise ConfigError("range step must be positive")
        n = int(round((stop - start) / step))
        return tuple(round(start + i * step, 10) for i in range(n + 1))
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"bad value list {text!r}") from None


def _names(text: str, allowed, what: str) -> tuple[str, ...]:
    names = tuple(x.strip() for x in text.split(",") if x.strip())
    bad = [n for n in names if n not in allowed]
    if bad:
        raise ConfigError(f"unknown {what}: {', '.join(bad)} (expected {', '.join(allowed)})")
    return names


@dataclass(frozen=True)
class ExperimentConfig:
    corpus_dir: Path | None = None
    index_dir: Path | None = None
    topics_dir: Path | None = None
    qrels_path: Path | None = None
    output_dir: Path = Path("out")
    schemata: tuple[str, ...] = tuple(SCHEMATA)
    variants: tuple[str, ...] = VARIANTS
    k1: float = 1.2
    b: float = 0.75
    cutoff: int = DEFAULT_CUTOFF
    tag: str = "bm25"
    sweep_axis: str | None = None
    sweep_values: tuple[float, ...] = ()
    baseline_schema: str = "baseline"
    jobs: int = 1
    source: Path | None = field(default=None, compare=False)

    def __post_init__(self):
        _names(",".join(self.schemata), SCHEMATA, "schema")
        _names(",".join(self.variants), VARIANTS, "query variant")
        if self.baseline_schema not in SCHEMATA:
            raise ConfigError(f"unknown baseline schema {self.baseline_schema!r}")
        if self.sweep_axis not in (None, "k1", "b"):
            raise ConfigError(f"sweep_axis must be k1 or b, got {self.sweep_axis!r}")
        if self.cutoff < 1:
            raise ConfigError("cutoff must be >= 1")
        if not self.tag or any(c.isspace() or c == "." for c in self.tag):
            raise ConfigError(f"tag must be a non-empty word without dots, got {self.tag!r}")
        try:
            self.params
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def params(self) -> BM25Params:
        return BM25Params(k1=self.k1, b=self.b)

    def require(self, *keys: str) -> None:
        """Check that the named paths are configured and exist."""
        for key in keys:
            value = getattr(self, key)
            if value is None:
                raise ConfigError(f"{key} is not configured")
            if not Path(value).exists():
                raise FileNotFoundError(f"{key} does not exist: {value}")


def parse_config(text: str, base: str | os.PathLike = ".", source=None) -> ExperimentConfig:
    known = {f.name for f in fields(ExperimentConfig)} - {"source"}
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        raw[key] = value

    base = Path(base)
    kw: dict = {}
    for key, value in raw.items():
        if key in PATH_KEYS:
            kw[key] = base / value
        elif key == "schemata":
            kw[key] = _names(value, SCHEMATA, "schema")
        elif key == "variants":
            kw[key] = _names(value, VARIANTS, "query variant")
        elif key in ("k1", "b", "cutoff", "jobs"):
            convert = float if key in ("k1", "b") else int
            try:
                kw[key] = convert(value)
            except ValueError:
                raise ConfigError(f"{key}: cannot parse {value!r}") from None
        elif key == "sweep_values":
            kw[key] = parse_values(value)
        elif key == "sweep_axis":
            kw[key] = value or None
        else:
            kw[key] = value
    return ExperimentConfig(**kw, source=source)


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    return parse_config(path.read_text(encoding="utf-8"), base=path.parent, source=path)


def with_overrides(config: ExperimentConfig, **changes) -> ExperimentConfig:
    return replace(config, **{k: v for k, v in changes.items() if v is not None})
