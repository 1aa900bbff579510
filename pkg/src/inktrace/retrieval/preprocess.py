"""Corpus cleaning: ASCII fold, stopword removal, suffix stripping.

The stopword list ships as a versioned data file and the stemmer is the
three-rule "S" suffix stripper, so cleaning is reproducible bit-for-bit:

* -ies -> -y   unless preceded by a or e
* -es  -> -e   unless preceded by a, e or o
* -s   -> ''   unless the word ends in -us or -ss

Markdown-style headings define the section trail and are lifted out of
the body before cleaning; sentence boundaries survive cleaning.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

_WORD = re.compile(r"[a-z0-9']+")
_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")
_HEADING = re.compile(r"^(#{1,6})\s*(.+?)\s*$")


@dataclass(frozen=True)
class PreparedSection:
    section_path: tuple[str, ...]
    sentences: tuple[str, ...]  # cleaned, non-empty


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    raw = resources.files("inktrace.data").joinpath("stopwords.txt")
    words = set()
    for line in raw.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line)
    return frozenset(words)


def stem(word: str) -> str:
    """Single-pass S-stemmer."""
    if len(word) > 3 and word.endswith("ies") and word[-4] not in ("a", "e"):
        return word[:-3] + "y"
    if len(word) > 3 and word.endswith("es") and word[-3] not in ("a", "e", "o"):
        return word[:-1]
    if len(word) > 2 and word.endswith("s") and not word.endswith(("us", "ss")):
        return word[:-1]
    return word


def split_sentences(text: str) -> list[str]:
    return [s for s in (_s.strip() for _s in _SENTENCE_SPLIT.split(text)) if s]


def clean_sentence(sentence: str) -> str:
    """ASCII-fold, lowercase, drop stopwords, stem. May come back empty."""
    ascii_text = sentence.encode("ascii", errors="ignore").decode("ascii")
    words = _WORD.findall(ascii_text.lower())
    kept = [stem(w) for w in words if w not in stopwords()]
    return " ".join(kept)


def prepare_document(raw_text: str) -> list[PreparedSection]:
    """Split a document into heading-scoped sections of cleaned sentences."""
    trail: list[str] = []
    sections: list[PreparedSection] = []
    buffer: list[str] = []

    def flush():
        if buffer:
            body = " ".join(buffer)
            cleaned = tuple(c for c in (clean_sentence(s)
                                        for s in split_sentences(body)) if c)
            if cleaned:
                sections.append(PreparedSection(tuple(trail), cleaned))
            buffer.clear()

    for line in raw_text.splitlines():
        m = _HEADING.match(line)
        if m:
            flush()
            level = len(m.group(1))
            del trail[level - 1:]
            trail.append(m.group(2))
        else:
            buffer.append(line)
    flush()
    return sections


def preprocess(raw_text: str) -> str:
    """Cleaned text of a whole document, sentence boundaries preserved."""
    sentences = [s for section in prepare_document(raw_text)
                 for s in section.sentences]
    return ". ".join(sentences)
