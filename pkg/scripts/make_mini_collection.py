"""Write the bundled synthetic mini-collection to data/mini/."""

import argparse
from pathlib import Path

from tarlab.synthetic import generate, write_collection

ROOT = Path(__file__).resolve().parents[1]

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=ROOT / "data" / "mini")
    ap.add_argument("--seed", type=int, default=2017)
    args = ap.parse_args()
    coll = generate(seed=args.seed)
    write_collection(coll, args.out)
    print(f"{len(coll.documents)} documents, {len(coll.topics)} topics -> {args.out}")
