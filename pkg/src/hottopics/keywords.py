"""Keyword extraction and topic normalization.

A record's keywords come from exactly one source, tried in order:

1. author keywords (DE), when the record has any;
2. otherwise Keywords Plus (ID);
3. otherwise the title, segmented into words with stopwords removed.

Each raw keyword is then lowercased and Porter-stemmed word by word
(hyphenated compounds are stemmed per segment, so "event-related potential"
becomes "event-relat potenti"), and finally mapped through a synonym table
that merges variants such as "function magnet reson imag" into "fmri".
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, NewType, Optional, Sequence, Union

from .porter import stem_word
from .wos import ArticleRecord

__all__ = [
    "Topic",
    "EmptyYield",
    "TableError",
    "StopwordList",
    "SynonymTable",
    "Pipeline",
    "tokenize",
    "extract_raw_keywords",
    "stem_phrase",
    "normalize_topic",
    "topics_of",
]

Topic = NewType("Topic", str)

_APOSTROPHES = re.compile(r"['’ʼ`]")
_TOKEN = re.compile(r"(?:[^\W_]|-)+")
_HAS_ALNUM = re.compile(r"[^\W_]")


class EmptyYield(ValueError):
    """A record produced no keywords from any source."""

    def __init__(self, accession_id: str):
        super().__init__(f"no keywords could be extracted from {accession_id}")
        self.accession_id = accession_id


class TableError(ValueError):
    """Invalid stopword or synonym table file."""


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _collapse(text: str) -> str:
    return " ".join(text.lower().split())


@dataclass(frozen=True)
class StopwordList:
    words: frozenset[str]

    def __post_init__(self):
        for word in self.words:
            if word != word.lower() or not word or len(word.split()) != 1:
                raise TableError(f"stopword entries must be single lowercase words: {word!r}")

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.words

    @classmethod
    def from_text(cls, text: str) -> "StopwordList":
        return cls(frozenset(w for w in map(_strip_comment, text.splitlines()) if w))

    @classmethod
    def load(cls, path: Union[str, Path]) -> "StopwordList":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def default(cls) -> "StopwordList":
        text = resources.files("hottopics").joinpath("data/stopwords.txt").read_text("utf-8")
        return cls.from_text(text)


@dataclass(frozen=True)
class SynonymTable:
    """Mapping from stemmed variant phrase to canonical topic.

    Chains (``a => b`` together with ``b => c``) and cycles are rejected, so
    every canonical value maps to itself or is absent from the keys.
    """

    mapping: Mapping[str, str] = field(default_factory=dict)
    source_path: Optional[Path] = None

    def __post_init__(self):
        for variant, canonical in self.mapping.items():
            target = self.mapping.get(canonical, canonical)
            if target != canonical:
                raise TableError(
                    f"synonym chain: {variant!r} => {canonical!r} => {target!r}"
                )
        object.__setattr__(self, "mapping", MappingProxyType(dict(self.mapping)))

    def __len__(self) -> int:
        return len(self.mapping)

    @classmethod
    def from_text(cls, text: str, source_path: Optional[Path] = None) -> "SynonymTable":
        mapping: dict[str, str] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = _strip_comment(raw)
            if not line:
                continue
            if "=>" not in line:
                raise TableError(f"{source_path or '<text>'}:{lineno}: expected 'variant => canonical'")
            left, right = (_collapse(side) for side in line.split("=>", 1))
            if not left or not right:
                raise TableError(f"{source_path or '<text>'}:{lineno}: empty side in synonym rule")
            if mapping.get(left, right) != right:
                raise TableError(
                    f"{source_path or '<text>'}:{lineno}: {left!r} already maps to {mapping[left]!r}"
                )
            mapping[left] = right
        return cls(mapping, source_path)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "SynonymTable":
        path = Path(path)
        return cls.from_text(path.read_text(encoding="utf-8"), path)

    @classmethod
    def default(cls) -> "SynonymTable":
        text = resources.files("hottopics").joinpath("data/synonyms.txt").read_text("utf-8")
        return cls.from_text(text)


def tokenize(text: str) -> list[str]:
    """Split free text into word tokens, keeping case and inner hyphens.

    Apostrophes are removed first ("Parkinson's" -> "Parkinsons"). Anything
    that is not a letter, digit or hyphen separates tokens; pure numbers
    are dropped.

    >>> tokenize("Dopamine and the aging brain, 2015 (event-related)")
    ['Dopamine', 'and', 'the', 'aging', 'brain', 'event-related']
    """
    tokens = []
    for match in _TOKEN.finditer(_APOSTROPHES.sub("", text)):
        token = match.group().strip("-")
        if token and not token.isdigit():
            tokens.append(token)
    return tokens


def _segment_title(
    title: str, stopwords: StopwordList, phrases: frozenset[tuple[str, ...]]
) -> list[str]:
    tokens = tokenize(title)
    lowered = [t.lower() for t in tokens]
    longest = max((len(p) for p in phrases), default=0)
    out: list[str] = []
    i = 0
    while i < len(tokens):
        for n in range(min(longest, len(tokens) - i), 1, -1):
            if tuple(lowered[i : i + n]) in phrases:
                out.append(" ".join(tokens[i : i + n]))
                i += n
                break
        else:
            if lowered[i] not in stopwords.words:
                out.append(tokens[i])
            i += 1
    return out


def extract_raw_keywords(
    record: ArticleRecord,
    stopwords: StopwordList,
    phrases: Iterable[Sequence[str]] = (),
) -> list[str]:
    """Raw keywords from the first non-empty source among DE, ID and title.

    ``phrases`` lists multi-word sequences (lowercase tokens) that title
    segmentation keeps together; by default titles yield single words.
    Raises EmptyYield when all three sources come up empty.
    """
    if record.author_keywords:
        return list(record.author_keywords)
    if record.keywords_plus:
        return list(record.keywords_plus)
    words = _segment_title(record.title, stopwords, frozenset(tuple(p) for p in phrases))
    if not words:
        raise EmptyYield(record.accession_id)
    return words


def stem_phrase(phrase: str) -> str:
    """Lowercase and stem a keyword phrase word by word.

    >>> stem_phrase("Prefrontal Cortex")
    'prefront cortex'
    >>> stem_phrase("event-related potential")
    'event-relat potenti'
    """
    words = _APOSTROPHES.sub("", phrase.lower()).split()
    return " ".join(
        "-".join(stem_word(seg) if seg else seg for seg in word.split("-"))
        for word in words
    )


def normalize_topic(stemmed_phrase: str, synonyms: SynonymTable) -> Topic:
    return Topic(synonyms.mapping.get(stemmed_phrase, stemmed_phrase))


def topics_of(
    record: ArticleRecord,
    stopwords: StopwordList,
    synonyms: SynonymTable,
    phrases: Iterable[Sequence[str]] = (),
) -> frozenset[Topic]:
    """Distinct canonical topics of one record."""
    topics = set()
    for raw in extract_raw_keywords(record, stopwords, phrases):
        stemmed = stem_phrase(raw)
        if _HAS_ALNUM.search(stemmed):
            topics.add(normalize_topic(stemmed, synonyms))
    if not topics:
        raise EmptyYield(record.accession_id)
    return frozenset(topics)


@dataclass(frozen=True)
class Pipeline:
    """Loaded tables for the extraction chain. Immutable and shareable."""

    stopwords: StopwordList
    synonyms: SynonymTable
    phrases: frozenset[tuple[str, ...]] = frozenset()

    @classmethod
    def default(cls) -> "Pipeline":
        return cls(StopwordList.default(), SynonymTable.default())

    @classmethod
    def from_paths(
        cls,
        stopwords: Optional[Union[str, Path]] = None,
        synonyms: Optional[Union[str, Path]] = None,
    ) -> "Pipeline":
        return cls(
            StopwordList.load(stopwords) if stopwords else StopwordList.default(),
            SynonymTable.load(synonyms) if synonyms else SynonymTable.default(),
        )

    def topics_of(self, record: ArticleRecord) -> frozenset[Topic]:
        return topics_of(record, self.stopwords, self.synonyms, self.phrases)

    def canonical(self, phrase: str) -> Topic:
        """Canonical topic for a free-form phrase typed by a user."""
        return normalize_topic(stem_phrase(phrase), self.synonyms)
