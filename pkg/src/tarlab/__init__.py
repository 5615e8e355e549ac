"""Retrieval experiments over PubMed citations for technology-assisted review.

Index MEDLINE records under several field schemata, turn CLEF TAR topics
into bag-of-words queries, rank with BM25, score runs with trec_eval-style
measures and compare systems with paired t-tests.
"""

__version__ = "0.1.0"
