"""Command line entry point.

    tarlab --config exp.cfg index [--force]
    tarlab --config exp.cfg run
    tarlab --config exp.cfg sweep --axis b --values 0.0:1.0:0.1
    tarlab --config exp.cfg eval [RUN ...]
    tarlab --config exp.cfg ttest
    tarlab --config exp.cfg report [--matrix-csv TABLE.csv]

Exit status: 0 on success, 1 on usage errors, 2 on data errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import harness
from . import matrix as mx
from .bm25 import RunFormatError
from .config import ConfigError, ExperimentConfig, load_config, parse_values, with_overrides
from .corpus import CorpusError
from .index import IndexBuildError, IndexStoreError
from .metrics import QrelsFormatError
from .topics import TopicFormatError

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

_DATA_ERRORS = (harness.DataError, CorpusError, IndexBuildError, IndexStoreError,
                TopicFormatError, QrelsFormatError, RunFormatError, FileNotFoundError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _global_flags(defaults: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--config", type=Path, default=d(None), help="experiment config file")
    p.add_argument("--force", action="store_true", default=d(False), help="overwrite existing indexes")
    p.add_argument("--jobs", type=int, default=d(None), help="worker processes for indexing")
    p.add_argument("-v", "--verbose", action="store_true", default=d(False))
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tarlab", description=__doc__.split("\n\n")[0],
                     parents=[_global_flags(True)])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = [_global_flags(False)]

    sub.add_parser("index", parents=common, help="build one index per schema")
    sub.add_parser("run", parents=common, help="retrieve every (schema, variant) cell")
    p = sub.add_parser("sweep", parents=common, help="retrieve over a k1 or b grid")
    p.add_argument("--axis", choices=("k1", "b"))
    p.add_argument("--values", help="comma list or start:stop:step")
    p = sub.add_parser("eval", parents=common, help="evaluate run files against qrels")
    p.add_argument("runs", nargs="*", type=Path)
    p.add_argument("--qrels", type=Path)
    sub.add_parser("ttest", parents=common, help="paired t-tests against the baseline schema")
    p = sub.add_parser("report", parents=common, help="emit comparison tables")
    p.add_argument("--matrix-csv", type=Path,
                   help="re-render an externally supplied MAP matrix instead of runs")
    p.add_argument("--out", type=Path, help="output directory for tables")
    return parser


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {"jobs": args.jobs}
    if args.command == "sweep":
        overrides["sweep_axis"] = args.axis
        overrides["sweep_values"] = parse_values(args.values) if args.values else None
    if args.command == "eval":
        overrides["qrels_path"] = args.qrels
    return with_overrides(cfg, **overrides)


def _report(args, cfg: ExperimentConfig) -> None:
    out = args.out or Path(cfg.output_dir) / "tables"
    if args.matrix_csv:
        if not args.matrix_csv.is_file():
            raise FileNotFoundError(f"matrix csv not found: {args.matrix_csv}")
        table = mx.read_matrix_csv(args.matrix_csv.read_text(encoding="utf-8"))
        name = args.matrix_csv.stem
        harness.write_tables({name: table}, out)
        sys.stdout.write(mx.to_markdown(table))
        return
    for path in harness.write_tables(harness.build_tables(cfg), out):
        print(path)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        if args.command == "index":
            paths = harness.cmd_index(cfg, force=args.force)
        elif args.command == "run":
            paths = harness.cmd_run(cfg)
        elif args.command == "sweep":
            paths = harness.cmd_sweep(cfg)
        elif args.command == "eval":
            reports = harness.cmd_eval(cfg, args.runs)
            for path, report in reports.items():
                print(f"{path.name}\tmap={report.map:.4f}\ttopics={report.evaluated_topic_count}")
            paths = []
        elif args.command == "ttest":
            paths = [harness.cmd_ttest(cfg)]
        else:
            _report(args, cfg)
            paths = []
        for p in paths:
            print(p)
    except ConfigError as exc:
        print(f"tarlab: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _DATA_ERRORS as exc:
        print(f"tarlab: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"tarlab: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
