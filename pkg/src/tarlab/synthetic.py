"""Deterministic synthetic mini-collection for desk-scale experiments.

Each topic owns a few pseudo-words. Relevant and judged non-relevant
citations use them in titles and abstracts at the same rates, so text alone
separates them poorly; only relevant citations carry the topic's MeSH
descriptors and are mostly published in the topic's journal, whose title and
MedlineTA abbreviation contain the topic's condition word. Topic queries
are written in Ovid syntax with explosions, field qualifiers and truncation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from .corpus import PubMedDocument, write_pubmed_xml

_ONSETS = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "t", "v", "z", "br", "dr", "gl",
           "kr", "pl", "tr", "st"]
_VOWELS = ["a", "e", "i", "o", "u"]
_CODAS = ["", "", "n", "r", "l", "x", "m"]
_GENERIC = ("patients study results clinical analysis trial cohort outcome evaluation "
            "treatment hospital sample review accuracy sensitivity specificity follow group "
            "measured observed reported baseline years adults children women men compared "
            "increased reduced significant association method data population").split()


def _word(rng: random.Random, syllables: int) -> str:
    return "".join(rng.choice(_ONSETS) + rng.choice(_VOWELS) + rng.choice(_CODAS)
                   for _ in range(syllables))


@dataclass(frozen=True)
class SyntheticTopic:
    topic_id: str
    condition: str
    subtype: str
    test: str
    journal: str
    medline_ta: str

    @property
    def mesh(self) -> str:
        return f"{self.condition.capitalize()} {self.subtype.capitalize()}"

    @property
    def title(self) -> str:
        return f"{self.test.capitalize()} for the diagnosis of {self.condition} {self.subtype}"

    def query_lines(self) -> list[str]:
        trunc = self.condition[: max(4, len(self.condition) - 3)]
        mid = len(self.test) // 2
        wild = self.test[:mid] + "?" + self.test[mid + 1:]
        return [
            f"1. exp {self.mesh}/",
            f"2. {trunc}$.ti,ab.",
            f"3. ({self.subtype} adj3 {self.condition}).ti,ab.",
            "4. or/1-3",
            f"5. {wild}.ti,ab.",
            f"6. {self.test}[tiab]",
            "7. 5 or 6",
            "8. 4 and 7",
        ]

    def topic_text(self, pids) -> str:
        lines = [f"Topic: {self.topic_id}", "", f"Title: {self.title}", "", "Query:"]
        lines += [f"  {q}" for q in self.query_lines()]
        lines += ["", "Pids:"] + [f"    {p}" for p in pids]
        return "\n".join(lines) + "\n"


@dataclass
class MiniCollection:
    documents: list[PubMedDocument]
    topics: list[SyntheticTopic]
    qrels: list[tuple[str, str, int]]

    def pids(self, topic_id: str) -> list[str]:
        return [p for t, p, _ in self.qrels if t == topic_id]


def generate(seed: int = 2017, n_topics: int = 12, n_relevant: int = 10,
             n_nonrelevant: int = 15, n_background: int = 60) -> MiniCollection:
    rng = random.Random(seed)
    used: set[str] = set(_GENERIC)

    def fresh(syllables: int) -> str:
        while True:
            w = _word(rng, syllables)
            if w not in used and len(w) >= 5:
                used.add(w)
                return w

    fillers = [fresh(2) for _ in range(250)]
    topics = []
    for i in range(n_topics):
        condition, subtype, test = fresh(3), fresh(2), fresh(3)
        topics.append(SyntheticTopic(
            topic_id=f"CD{10001 + i:06d}",
            condition=condition, subtype=subtype, test=test,
            journal=f"Journal of {condition.capitalize()} Research",
            medline_ta=f"J {condition.capitalize()} Res",
        ))
    other_journals = [(f"Annals of {w.capitalize()}", f"Ann {w[:4].capitalize()}")
                      for w in (fresh(2) for _ in range(8))]
    general_mesh = [w.capitalize() for w in (fresh(2) for _ in range(20))]
    qualifiers = ["diagnosis", "therapy", "epidemiology", "pathology"]
    surnames = [w.capitalize() for w in (fresh(2) for _ in range(40))]
    forenames = [w.capitalize() for w in (fresh(2) for _ in range(20))]

    pmids = rng.sample(range(10_000_000, 29_999_999), n_topics * (n_relevant + n_nonrelevant) + n_background)
    pmid_iter = iter(str(p) for p in pmids)

    def sentence(topic_words: list[str], n_topic: int) -> str:
        words = [rng.choice(fillers if rng.random() < 0.7 else _GENERIC) for _ in range(rng.randint(8, 14))]
        for _ in range(n_topic):
            words.insert(rng.randrange(len(words) + 1), rng.choice(topic_words))
        return " ".join(words).capitalize() + "."

    def authors():
        return tuple(f"{rng.choice(surnames)} {rng.choice(forenames)}" for _ in range(rng.randint(1, 4)))

    def document(topic: SyntheticTopic | None, relevant: bool) -> PubMedDocument:
        words = [topic.condition, topic.subtype, topic.test] if topic else []
        title_topic = 1 if topic and rng.random() < 0.6 else 0
        abstract = " ".join(sentence(words, rng.randint(0, 2) if topic else 0)
                            for _ in range(rng.randint(3, 5)))
        if topic and relevant:
            mesh = [topic.mesh, rng.choice(qualifiers), rng.choice(general_mesh)]
            journal, ta = ((topic.journal, topic.medline_ta) if rng.random() < 0.8
                           else rng.choice(other_journals))
        else:
            mesh = rng.sample(general_mesh, 2) + [rng.choice(qualifiers)]
            journal, ta = rng.choice(other_journals)
        return PubMedDocument(
            pmid=next(pmid_iter),
            title=sentence(words, title_topic).rstrip("."),
            abstract=abstract,
            authors=authors(),
            journal_title=journal,
            year=rng.randint(1990, 2016),
            mesh_headings=tuple(mesh),
            medline_ta=ta,
        )

    docs, qrels = [], []
    for topic in topics:
        for k in range(n_relevant + n_nonrelevant):
            relevant = k < n_relevant
            doc = document(topic, relevant)
            docs.append(doc)
            qrels.append((topic.topic_id, doc.pmid, int(relevant)))
    docs.extend(document(None, False) for _ in range(n_background))
    rng.shuffle(docs)
    return MiniCollection(docs, topics, qrels)


CONFIG_TEXT = """\
# desk-scale experiment over the bundled synthetic collection
corpus_dir   = corpus
topics_dir   = topics
qrels_path   = qrels.txt
index_dir    = out/index
output_dir   = out
schemata     = baseline, 1+AJY, 2+MHL, 2+MTA, 2+MHLMTA
variants     = title, query, title&query, query2, title&query2
k1           = 1.2
b            = 0.75
cutoff       = 1000
tag          = bm25
sweep_axis   = b
sweep_values = 0.0:1.0:0.1
"""


def write_collection(collection: MiniCollection, directory: str | Path, n_files: int = 2) -> Path:
    """Write corpus XML files, topic files, qrels and an experiment config."""
    directory = Path(directory)
    (directory / "corpus").mkdir(parents=True, exist_ok=True)
    (directory / "topics").mkdir(parents=True, exist_ok=True)
    per_file = -(-len(collection.documents) // n_files)
    for i in range(n_files):
        chunk = collection.documents[i * per_file:(i + 1) * per_file]
        with open(directory / "corpus" / f"pubmed{i:02d}.xml", "wb") as f:
            write_pubmed_xml(chunk, f)
    for topic in collection.topics:
        (directory / "topics" / topic.topic_id).write_text(
            topic.topic_text(collection.pids(topic.topic_id)), encoding="utf-8")
    qrels = "".join(f"{t} 0 {p} {r}\n" for t, p, r in collection.qrels)
    (directory / "qrels.txt").write_text(qrels, encoding="utf-8")
    (directory / "experiment.cfg").write_text(CONFIG_TEXT, encoding="utf-8")
    return directory
