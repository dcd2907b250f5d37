"""Topic frequency and usage statistics over a corpus.

Every article passes its cumulative "since 2013" usage count to each of its
distinct topics. A topic's share of usage (``ratio1``) is its usage total
over the usage of *all* articles, including articles from which no keyword
could be extracted, so shares of different topics do not sum to one.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import warnings
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .keywords import EmptyYield, Pipeline, Topic
from .wos import ArticleRecord

__all__ = [
    "TopicStats",
    "QuadrantSets",
    "EmptyCorpus",
    "ZeroUsageCorpus",
    "article_topics",
    "aggregate",
    "top_by_frequency",
    "top_by_usage",
    "quadrants",
    "quadrants_from_rankings",
    "format_percent",
    "table_rows",
    "table_csv",
    "table_json",
    "quadrants_json",
]

log = logging.getLogger(__name__)

TABLE_COLUMNS = ("rank", "topic", "frequency", "usage_total", "ratio1_percent")


class EmptyCorpus(ValueError):
    """Aggregation was asked for over zero records."""


class ZeroUsageCorpus(UserWarning):
    """The corpus has no usage at all; every ratio is reported as 0."""


@dataclass(frozen=True)
class TopicStats:
    topic: Topic
    frequency: int
    usage_total: int
    ratio1: float


@dataclass(frozen=True)
class QuadrantSets:
    both: frozenset[Topic]
    freq_only: frozenset[Topic]
    usage_only: frozenset[Topic]
    k: int

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "both": sorted(self.both),
            "freq_only": sorted(self.freq_only),
            "usage_only": sorted(self.usage_only),
        }


def article_topics(
    records: Iterable[ArticleRecord], pipeline: Pipeline
) -> dict[str, frozenset[Topic]]:
    """Topic set per accession id; records without keywords map to an empty set."""
    out = {}
    for record in records:
        try:
            out[record.accession_id] = pipeline.topics_of(record)
        except EmptyYield:
            log.debug("no keywords in %s", record.accession_id)
            out[record.accession_id] = frozenset()
    return out


def aggregate(records: Sequence[ArticleRecord], pipeline: Pipeline) -> dict[Topic, TopicStats]:
    """Per-topic frequency, usage total and ratio1.

    Raises EmptyCorpus for an empty record list. A corpus whose total usage
    is zero emits a ZeroUsageCorpus warning and reports ratio1 = 0.
    """
    if not records:
        raise EmptyCorpus("no records to aggregate")
    frequency: dict[Topic, int] = defaultdict(int)
    usage: dict[Topic, int] = defaultdict(int)
    total = 0
    for record in records:
        total += record.usage_since_2013
        try:
            topics = pipeline.topics_of(record)
        except EmptyYield:
            continue
        for topic in topics:
            frequency[topic] += 1
            usage[topic] += record.usage_since_2013

    if total == 0:
        warnings.warn("corpus has zero total usage; ratio1 set to 0", ZeroUsageCorpus, stacklevel=2)
    return {
        topic: TopicStats(topic, frequency[topic], usage[topic], usage[topic] / total if total else 0.0)
        for topic in frequency
    }


def _check_k(k: int) -> None:
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")


def top_by_frequency(stats: Mapping[Topic, TopicStats] | Iterable[TopicStats], k: int) -> list[TopicStats]:
    """Rank by frequency, then usage total, then topic (byte order)."""
    _check_k(k)
    values = stats.values() if isinstance(stats, Mapping) else stats
    return sorted(values, key=lambda s: (-s.frequency, -s.usage_total, s.topic))[:k]


def top_by_usage(stats: Mapping[Topic, TopicStats] | Iterable[TopicStats], k: int) -> list[TopicStats]:
    """Rank by usage total, then frequency, then topic (byte order)."""
    _check_k(k)
    values = stats.values() if isinstance(stats, Mapping) else stats
    return sorted(values, key=lambda s: (-s.usage_total, -s.frequency, s.topic))[:k]


def quadrants_from_rankings(
    by_frequency: Sequence[str], by_usage: Sequence[str], k: int
) -> QuadrantSets:
    """Split the top-``k`` of two ranked topic lists into shared and exclusive sets."""
    _check_k(k)
    top_f = frozenset(by_frequency[:k])
    top_u = frozenset(by_usage[:k])
    return QuadrantSets(
        both=top_f & top_u,
        freq_only=top_f - top_u,
        usage_only=top_u - top_f,
        k=k,
    )


def quadrants(stats: Mapping[Topic, TopicStats], k: int) -> QuadrantSets:
    return quadrants_from_rankings(
        [s.topic for s in top_by_frequency(stats, k)],
        [s.topic for s in top_by_usage(stats, k)],
        k,
    )


def format_percent(ratio: float) -> str:
    """Display form used in ranked tables, e.g. ``0.0807 -> '8.07%'``."""
    return f"{ratio * 100:.2f}%"


def table_rows(ranked: Sequence[TopicStats]) -> list[dict]:
    return [
        {
            "rank": rank,
            "topic": s.topic,
            "frequency": s.frequency,
            "usage_total": s.usage_total,
            "ratio1_percent": f"{s.ratio1 * 100:.2f}",
        }
        for rank, s in enumerate(ranked, start=1)
    ]


def table_csv(ranked: Sequence[TopicStats]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=TABLE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(table_rows(ranked))
    return buf.getvalue()


def table_json(ranked: Sequence[TopicStats]) -> str:
    rows = table_rows(ranked)
    for row in rows:
        row["ratio1_percent"] = float(row["ratio1_percent"])
    return json.dumps(rows, indent=2, ensure_ascii=False) + "\n"


def quadrants_json(sets: QuadrantSets) -> str:
    return json.dumps(sets.as_dict(), indent=2, ensure_ascii=False) + "\n"
