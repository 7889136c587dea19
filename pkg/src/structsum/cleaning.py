"""Heuristic clean-up of extracted article text before summarization.

Drops boilerplate sections, non-prose nodes (tables, figures, footnotes),
URLs, non-ASCII characters and inline citation markers, and flattens what
remains to a single line of text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from structsum.types import ArticleText

DEFAULT_REMOVED_SECTIONS = frozenset(
    {
        "abstract",
        "related work",
        "background",
        "acknowledgments",
        "acknowledgements",
        "references",
    }
)

URL_RE = re.compile(r"(?:\b[a-zA-Z][a-zA-Z0-9+.-]*://|\bwww\.)\S*")
NON_ASCII_RE = re.compile(r"[^\x00-\x7f]+")
NUMERIC_CITATION_RE = re.compile(r"\[\s*\d+(?:\s*[-,]\s*\d+)*\s*\]")
# a parenthetical with a plausible publication year, e.g. "(Lee et al., 2019)"
AUTHOR_YEAR_RE = re.compile(r"\([^()]*?\b(?:18|19|20)\d{2}[a-z]?\b[^()]*\)")
_SPACE_BEFORE_PUNCT = re.compile(r"\s+([.,;!?])")
_WS = re.compile(r"\s+")
_LEADING_NUMBERING = re.compile(r"^(?:\d+(?:\.\d+)*\.?|[ivxlcdm]+\.)\s+", re.IGNORECASE)


@dataclass(frozen=True)
class CleaningConfig:
    removed_sections: frozenset[str] = field(default=DEFAULT_REMOVED_SECTIONS)
    strip_urls: bool = True
    ascii_only: bool = True
    strip_citations: bool = True

    @classmethod
    def from_dict(cls, d: dict) -> CleaningConfig:
        kwargs = dict(d)
        if "removed_sections" in kwargs:
            kwargs["removed_sections"] = frozenset(
                normalize_section_label(s) for s in kwargs["removed_sections"]
            )
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "removed_sections": sorted(self.removed_sections),
            "strip_urls": self.strip_urls,
            "ascii_only": self.ascii_only,
            "strip_citations": self.strip_citations,
        }


def normalize_section_label(label: str) -> str:
    """Lowercase, trim and drop leading numbering such as ``3.1`` or ``IV.``."""
    label = _WS.sub(" ", label).strip()
    label = _LEADING_NUMBERING.sub("", label)
    return label.strip().lower()


def strip_citation_markers(text: str) -> str:
    # nested parentheticals may expose a new citation once the inner one is gone
    while True:
        out = AUTHOR_YEAR_RE.sub(" ", NUMERIC_CITATION_RE.sub(" ", text))
        if out == text:
            return _collapse(out)
        text = out


def _collapse(text: str) -> str:
    return _WS.sub(" ", text).strip()


def _clean_pass(text: str, config: CleaningConfig) -> str:
    if config.ascii_only:
        text = NON_ASCII_RE.sub("", text)
    if config.strip_urls:
        text = URL_RE.sub(" ", text)
    if config.strip_citations:
        text = strip_citation_markers(text)
    text = _collapse(text)
    return _SPACE_BEFORE_PUNCT.sub(r"\1", text)


def clean_text(text: str, config: CleaningConfig = CleaningConfig()) -> str:
    """Apply the text-level rules until nothing changes.

    Every pass only deletes characters, so the loop terminates, and the
    fixed point makes the function idempotent by construction.
    """
    while True:
        out = _clean_pass(text, config)
        if out == text:
            return out
        text = out


def kept_paragraphs(article: ArticleText, config: CleaningConfig = CleaningConfig()) -> list[str]:
    removed = config.removed_sections
    return [
        p
        for section in article.sections
        if normalize_section_label(section.label) not in removed
        for p in section.paragraphs
    ]


def clean_article(article: ArticleText, config: CleaningConfig = CleaningConfig()) -> str:
    """Flatten an article into cleaned summarizer input.

    Non-prose nodes and section headers never reach the output. Returns an
    empty string when every section was removed.
    """
    return clean_text(" ".join(kept_paragraphs(article, config)), config)
