"""Re-render the published MAP tables in data/published/ as markdown.

Writes csv, markdown and plot data for each table into --out (default
out/published) and prints the markdown.
"""

import argparse
from pathlib import Path

from tarlab.harness import write_tables
from tarlab.matrix import read_matrix_csv, to_markdown

ROOT = Path(__file__).resolve().parents[1]

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--src", type=Path, default=ROOT / "data" / "published")
    ap.add_argument("--out", type=Path, default=Path("out") / "published")
    args = ap.parse_args()

    tables = {}
    for path in sorted(args.src.glob("*.csv")):
        tables[path.stem] = read_matrix_csv(path.read_text(encoding="utf-8"), title=path.stem)
    write_tables(tables, args.out)
    for table in tables.values():
        print(to_markdown(table))
