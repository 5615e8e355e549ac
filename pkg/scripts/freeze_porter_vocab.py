"""Regenerate tests/data/porter_vocab.tsv.

Samples words from the web2 word list and keeps the pairs on which two
independent Porter implementations (NLTK in original-algorithm mode and the
Snowball ``porter`` stemmer) agree. Needs ``english-words``, ``nltk`` and
``PyStemmer``; the package itself does not.
"""

import random
import sys
from pathlib import Path

import Stemmer
from english_words import get_english_words_set
from nltk.stem.porter import PorterStemmer

N_WORDS = 2500


def main(out=Path(__file__).resolve().parents[1] / "tests" / "data" / "porter_vocab.tsv"):
    words = sorted(get_english_words_set(["web2"], lower=True, alpha=True))
    rng = random.Random(1980)
    sample = rng.sample(words, N_WORDS * 2)
    nltk_stem = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM).stem
    snowball = Stemmer.Stemmer("porter")
    rows = []
    for w in sample:
        a, b = nltk_stem(w), snowball.stemWord(w)
        if a == b:
            rows.append(f"{w}\t{a}\n")
        if len(rows) == N_WORDS:
            break
    Path(out).write_text("".join(sorted(rows)), encoding="utf-8")
    print(f"wrote {len(rows)} pairs to {out}", file=sys.stderr)


if __name__ == "__main__":
    main(*sys.argv[1:])
