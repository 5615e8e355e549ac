import json
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import DATA
from tarlab.topics import (
    QUALIFIER_SUFFIXES,
    Topic,
    VARIANTS,
    TopicFormatError,
    clean_query2,
    flatten_query,
    make_query,
    parse_topic_file,
    read_topics,
)

EXAMPLE = "Topic: CD008081\nTitle: Dementia tests\nQuery:\n1. exp Dementia/\n2. 1 or 2"


def test_parse_topic_file():
    topic = parse_topic_file(EXAMPLE)
    assert topic.topic_id == "CD008081"
    assert topic.title == "Dementia tests"
    assert topic.boolean_query == ("1. exp Dementia/", "2. 1 or 2")
    assert topic.pids == ()


def test_pids_and_indentation():
    text = ("Topic: CD1\n\nTitle: A long review title\n  wrapped here\n\nQuery:\n\n"
            "  1. aspirin.ti,ab.\n\nPids:\n    123\n    456\n")
    topic = parse_topic_file(text)
    assert topic.pids == ("123", "456")
    assert topic.title == "A long review title wrapped here"
    assert topic.boolean_query == ("1. aspirin.ti,ab.",)


@pytest.mark.parametrize("section", ["Topic", "Title", "Query"])
def test_missing_section(section):
    lines = [l for l in EXAMPLE.splitlines() if not l.startswith(section + ":")]
    if section == "Query":
        lines = lines[:2]
    with pytest.raises(TopicFormatError) as info:
        parse_topic_file("\n".join(lines))
    assert info.value.section == section
    assert section in str(info.value)


@pytest.mark.parametrize("lines,expected", [
    (["1. exp Dementia/", "2. 1 or 2"], ["exp", "Dementia/"]),
    (["3. wom?n.ti,ab."], ["wom?n.ti,ab."]),
    (["4. (aspirin and placebo)"], ["aspirin", "placebo"]),
    (["#5 aspirin NOT placebo"], ["aspirin", "placebo"]),
    (["6. or/1-5", "7. and/3,4", "8. 1 and 2 and 3"], []),
])
def test_flatten_query(lines, expected):
    assert flatten_query(lines) == expected


@pytest.mark.parametrize("lines,expected", [
    (["1. exp Dementia/"], ["Dementia"]),
    (["3. wom?n.ti,ab."], ["wom*n"]),
    (["5. randomi$ed[tiab]"], ["randomi*ed"]),
    (["6. child$.tw."], ["child*"]),
    (["7. Aged/"], ["Aged"]),
    (["8. odd.xy."], ["odd.xy."]),
])
def test_clean_query2(lines, expected):
    assert clean_query2(lines) == expected


def test_make_query_variants():
    topic = parse_topic_file(EXAMPLE)
    assert make_query(topic, "title").terms == ("Dementia", "tests")
    assert make_query(topic, "title&query2").terms == ("Dementia", "tests", "Dementia")
    assert make_query(topic, "query").terms == ("exp", "Dementia/")
    assert make_query(topic, "query2").terms == ("Dementia",)
    q = make_query(topic, "title&query")
    assert (q.topic_id, q.variant) == ("CD008081", "title&query")
    with pytest.raises(ValueError):
        make_query(topic, "abstract")


def test_read_topics_sorted(tmp_path):
    (tmp_path / "CD2").write_text(EXAMPLE.replace("CD008081", "CD2"))
    (tmp_path / "CD1").write_text(EXAMPLE.replace("CD008081", "CD1"))
    (tmp_path / ".hidden").write_text("junk")
    assert [t.topic_id for t in read_topics(tmp_path)] == ["CD1", "CD2"]
    with pytest.raises(FileNotFoundError):
        read_topics(tmp_path / "missing")


def test_goldens_file_matches():
    for line in (DATA / "ovid_query2_goldens.tsv").read_text().splitlines():
        if line.startswith("#") or not line.strip():
            continue
        query_line, golden = line.split("\t")
        assert clean_query2([query_line]) == json.loads(golden), query_line


_piece = st.one_of(
    st.sampled_from(["exp", "EXP", "and", "OR", "not", "(", ")", "/", "adj3", "1", "2-4",
                     "or/1-3", "#2", "$", "?", "#", "*", "$2"]),
    st.sampled_from(QUALIFIER_SUFFIXES),
    st.text(st.sampled_from("abcxyzAB"), min_size=1, max_size=6),
)
_lines = st.lists(
    st.tuples(st.integers(1, 30), st.lists(_piece, min_size=1, max_size=8).map("".join)
              | st.lists(_piece, min_size=1, max_size=8).map(" ".join))
    .map(lambda t: f"{t[0]}. {t[1]}"),
    max_size=6,
)


@settings(max_examples=300, deadline=None)
@given(_lines)
def test_query_invariants(lines):
    flat = flatten_query(lines)
    for tok in flat:
        assert tok.lower() not in {"and", "or", "not"}
        assert not re.fullmatch(r"[\d,\-]+", tok)
        assert "(" not in tok and ")" not in tok
    for tok in clean_query2(lines):
        assert not set(tok) & set("?#$")
        assert tok.lower() != "exp"
        assert not tok.endswith("/")
        assert not any(tok.lower().endswith(s) for s in QUALIFIER_SUFFIXES)
        assert tok


@settings(max_examples=100, deadline=None)
@given(_lines, st.text(st.sampled_from("abc XYZ"), min_size=1, max_size=20).filter(str.strip))
def test_concatenation_invariant(lines, title):
    topic = Topic("CD1", title, tuple(lines) or ("1. x",))
    by = {v: make_query(topic, v).terms for v in VARIANTS}
    assert by["title&query"] == by["title"] + by["query"]
    assert by["title&query2"] == by["title"] + by["query2"]
    assert make_query(topic, "query2") == make_query(topic, "query2")
