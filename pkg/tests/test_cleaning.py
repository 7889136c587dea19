import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from structsum.cleaning import (
    URL_RE,
    CleaningConfig,
    clean_article,
    clean_text,
    normalize_section_label,
    strip_citation_markers,
)
from structsum.types import ArticleText, NonProseNode, Section


def article(*sections, non_prose=()):
    return ArticleText("p1", tuple(Section(label, tuple(paras)) for label, paras in sections), tuple(non_prose))


def test_removed_section_dropped():
    assert clean_article(article(("Related Work", ["A"]), ("Method", ["B"]))) == "B"


def test_url_removed():
    assert clean_article(article(("Method", ["see https://x.org/a?b=1 for details"]))) == "see for details"


def test_non_ascii_and_citations():
    text = "naïve approach [12] works (Smith et al., 2020)"
    assert clean_article(article(("Method", [text]))) == "nave approach works"


def test_non_prose_never_included():
    a = article(("Method", ["body"]), non_prose=[NonProseNode("table", "TABLE"), NonProseNode("footnote", "FN")])
    assert clean_article(a) == "body"


def test_all_sections_removed_gives_empty():
    assert clean_article(article(("Abstract", ["x"]), ("References", ["y"]))) == ""


def test_paragraphs_joined_with_single_space():
    assert clean_article(article(("Intro", ["a  b", "c"]), ("Method", ["d\n e"]))) == "a b c d e"


def test_substring_labels_kept():
    assert clean_article(article(("Methods Related to X", ["kept"]))) == "kept"


def test_custom_config():
    cfg = CleaningConfig.from_dict({"removed_sections": ["Method"], "strip_urls": False})
    a = article(("Method", ["gone"]), ("Results", ["see http://x.org"]))
    assert clean_article(a, cfg) == "see http://x.org"


@pytest.mark.parametrize(
    "text, expected",
    [
        ("works [3,5] well", "works well"),
        ("shown (Lee et al., 2019)", "shown"),
        ("range (2, 4) kept", "range (2, 4) kept"),
        ("see [1-4] and [7]", "see and"),
        ("nested (a (Lee, 2019) b 2020) end", "nested end"),
        ("year (n = 1000) kept", "year (n = 1000) kept"),
    ],
)
def test_strip_citation_markers(text, expected):
    assert strip_citation_markers(text) == expected


@pytest.mark.parametrize(
    "label, expected",
    [
        ("3. Related Work", "related work"),
        ("REFERENCES", "references"),
        ("IV. Background", "background"),
        ("3.1 Background", "background"),
        ("  Acknowledgments ", "acknowledgments"),
        ("Introduction", "introduction"),
    ],
)
def test_normalize_section_label(label, expected):
    assert normalize_section_label(label) == expected


def test_space_before_punctuation_tidied():
    assert clean_text("shown [3].") == "shown."


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet=st.sampled_from(list("ab :/.[](),;1290 \tw-é")), max_size=80))
def test_clean_text_invariants(text):
    out = clean_text(text)
    assert clean_text(out) == out
    assert out == out.strip() and "  " not in out
    assert out.isascii()
    assert URL_RE.search(out) is None
