"""Small random corpora shared by index, search and acceptance tests."""

import random

from tarlab.corpus import PubMedDocument

VOCAB = ("aspirin dementia trial trials cohort screening memory clock drawing test tests "
         "patients elderly women woman randomised randomized placebo stroke cognitive "
         "impairment diagnosis accuracy sensitivity specificity review outcome outcomes "
         "blood pressure therapy treatment anti-viral 50mg follow-up").split()
MESH = ["Dementia", "Aspirin", "Stroke", "Humans", "Aged", "Female", "Male", "Memory"]
JOURNALS = [("British medical journal", "BMJ"), ("The Lancet", "Lancet"),
            ("Journal of clinical epidemiology", "J Clin Epidemiol")]


def random_docs(seed: int, n: int = 100) -> list[PubMedDocument]:
    rng = random.Random(seed)
    pmids = rng.sample(range(1000, 10**8), n)
    docs = []
    for pmid in pmids:
        journal, ta = rng.choice(JOURNALS)
        docs.append(PubMedDocument(
            pmid=str(pmid),
            title=" ".join(rng.choices(VOCAB, k=rng.randint(2, 8))),
            abstract=" ".join(rng.choices(VOCAB + ["the", "of", "and"], k=rng.randint(0, 40))),
            authors=tuple(f"Author{rng.randint(1, 20)} X" for _ in range(rng.randint(0, 3))),
            journal_title=journal,
            year=rng.choice([None, rng.randint(1990, 2016)]),
            mesh_headings=tuple(rng.sample(MESH, rng.randint(0, 3))),
            medline_ta=ta,
        ))
    return docs


def random_queries(seed: int, n: int = 20) -> list[list[str]]:
    rng = random.Random(seed)
    pool = VOCAB + [m.lower() for m in MESH] + ["bmj", "lancet", "unseenword"]
    return [rng.sample(pool, rng.randint(1, 5)) for _ in range(n)]


def brute_force_scores(docs, schema, query_terms, k1=1.2, b=0.75, chain=None):
    """Re-analyze every document and score the query term by term.

    Shares nothing with the index beyond ``analyze``: collection statistics,
    term counts and the BM25 sum are recomputed from scratch.
    """
    import math
    from collections import Counter

    from tarlab.analysis import DEFAULT_CHAIN, analyze

    chain = chain or DEFAULT_CHAIN
    bags = [analyze(schema.document_text(d), chain) for d in docs]
    N = len(bags)
    avgdl = sum(len(bag) for bag in bags) / N
    qterms = [t for raw in query_terms for t in analyze(raw, chain)]
    out = []
    for bag in bags:
        counts = Counter(bag)
        s = 0.0
        for term in qterms:
            df = sum(1 for other in bags if term in other)
            tf = counts[term]
            if tf == 0:
                continue
            idf = math.log(1 + (N - df + 0.5) / (df + 0.5))
            s += idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len(bag) / avgdl))
        out.append(s)
    return out


def brute_force_ranking(docs, schema, query_terms, k1=1.2, b=0.75, cutoff=1000):
    scores = brute_force_scores(docs, schema, query_terms, k1, b)
    hits = [(s, d.pmid) for s, d in zip(scores, docs) if s > 0]
    hits.sort(key=lambda h: (-h[0], int(h[1])))
    return hits[:cutoff]


def random_eval_fixture(seed: int, n_topics: int = 6, n_docs: int = 240):
    """(run entries, qrels judgments) with distinct scores and R > 0 everywhere."""
    from tarlab.bm25 import RunEntry

    rng = random.Random(seed)
    run, judgments = [], {}
    for t in range(n_topics):
        topic = f"CD{seed:03d}{t:03d}"
        pmids = [str(p) for p in rng.sample(range(10**6, 10**7), n_docs)]
        rate = rng.uniform(0.02, 0.3)
        rel = [p for p in pmids if rng.random() < rate] or [pmids[0]]
        judged = rng.sample(pmids, n_docs // 2)
        for p in judged:
            judgments[topic, p] = int(p in rel)
        for p in rel:
            judgments[topic, p] = 1
        # some relevant documents are never retrieved
        extra = [str(p) for p in rng.sample(range(10**7, 2 * 10**7), rng.randint(0, 5))]
        for p in extra:
            judgments[topic, p] = 1
        retrieved = rng.sample(pmids, rng.randint(n_docs // 2, n_docs))
        scores = rng.sample(range(1, 10**6), len(retrieved))
        ranked = sorted(zip(scores, retrieved), reverse=True)
        run += [RunEntry(topic, i, p, s / 1000.0, "fx") for i, (s, p) in enumerate(ranked, 1)]
    return run, judgments


def trec_eval_oracle(run, judgments):
    """Per-topic measures from the trec_eval C code (via pytrec_eval)."""
    import pytrec_eval

    qrels: dict = {}
    for (t, p), r in judgments.items():
        qrels.setdefault(t, {})[p] = r
    results: dict = {}
    for e in run:
        results.setdefault(e.topic_id, {})[e.pmid] = e.score
    ev = pytrec_eval.RelevanceEvaluator(qrels, {"map", "P", "iprec_at_recall"})
    return ev.evaluate(results)
