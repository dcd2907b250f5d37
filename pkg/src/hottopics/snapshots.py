"""Dated usage snapshots and per-period topic shares.

A snapshot records every article's cumulative usage count on one date.
Consecutive snapshots give per-article usage within the period between
them; a topic's share of that period's usage is its ``ratio2``. Cumulative
counts never go down, so a period with a negative per-article delta is
treated as corrupt and dropped from series. Periods can also be excluded by
hand.

Snapshots live in a store directory, one append-only file per date::

    #date: 2015-10-19
    WOS:000000000000001\t12
    WOS:000000000000002\t0
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import re
import statistics
import warnings
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from .keywords import Topic
from .wos import ArticleRecord, read_export, write_export

__all__ = [
    "Snapshot",
    "SnapshotStore",
    "PeriodDelta",
    "SeriesPoint",
    "TopicSeries",
    "DuplicateDate",
    "UnwritableStore",
    "BadOrder",
    "UnknownTopic",
    "period_delta",
    "parse_period",
    "ratio2_series",
    "classify_trend",
    "series_csv",
    "series_json",
    "EPSILON",
    "TREND_FACTOR",
    "CV_STABLE",
]

EPSILON = 0.001
TREND_FACTOR = 2.0
CV_STABLE = 0.35
MIN_WINDOW = 2

NEGATIVE_DELTA = "negative delta"
ZERO_DENOMINATOR = "zero-denominator"

_PERIOD = re.compile(r"^\s*(\d{4}-\d{2}-\d{2})\s*\.\.\s*(\d{4}-\d{2}-\d{2})\s*$")


class DuplicateDate(ValueError):
    pass


class UnwritableStore(OSError):
    pass


class BadOrder(ValueError):
    pass


class UnknownTopic(UserWarning):
    """Requested topic is carried by no article."""


@dataclass(frozen=True)
class Snapshot:
    date: date
    usage: Mapping[str, int]
    source_file: Optional[Path] = None

    def __post_init__(self):
        for article, count in self.usage.items():
            if count < 0:
                raise ValueError(f"negative usage {count} for {article} on {self.date}")

    def dumps(self) -> str:
        lines = [f"#date: {self.date.isoformat()}"]
        lines.extend(f"{article}\t{self.usage[article]}" for article in sorted(self.usage))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str, source_file: Optional[Path] = None) -> "Snapshot":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("#date:"):
            raise ValueError(f"{source_file}: missing '#date: YYYY-MM-DD' header")
        day = date.fromisoformat(lines[0][len("#date:"):].strip())
        usage = {}
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            article, _, count = line.partition("\t")
            if not count.strip().isdigit():
                raise ValueError(f"{source_file}:{lineno}: expected 'id<TAB>count'")
            usage[article] = int(count)
        return cls(day, usage, source_file)


class SnapshotStore:
    """Directory holding dated snapshot files and the merged corpus.

    Single writer, many readers. Snapshot files are created exclusively and
    never rewritten; ``corpus.txt`` is replaced atomically on each ingest.
    """

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)
        self.snapshot_dir = self.root / "snapshots"

    @property
    def corpus_path(self) -> Path:
        return self.root / "corpus.txt"

    def read_corpus(self) -> list[ArticleRecord]:
        if not self.corpus_path.exists():
            return []
        return read_export(self.corpus_path)

    def write_corpus(self, records: Iterable[ArticleRecord]) -> None:
        """Replace the merged corpus file atomically."""
        tmp = self.corpus_path.with_suffix(".tmp")
        try:
            self.root.mkdir(parents=True, exist_ok=True)
            tmp.write_text(write_export(records), encoding="utf-8", newline="\n")
            os.replace(tmp, self.corpus_path)
        except OSError as exc:
            raise UnwritableStore(f"cannot write corpus to {self.corpus_path}: {exc}") from exc

    def _path(self, day: date) -> Path:
        return self.snapshot_dir / f"{day.isoformat()}.tsv"

    def dates(self) -> list[date]:
        if not self.snapshot_dir.is_dir():
            return []
        return sorted(date.fromisoformat(p.stem) for p in self.snapshot_dir.glob("*.tsv"))

    def __len__(self) -> int:
        return len(self.dates())

    def __contains__(self, day: date) -> bool:
        return self._path(day).exists()

    def add(self, snapshot: Snapshot) -> Path:
        """Persist ``snapshot``; existing dates are never overwritten."""
        path = self._path(snapshot.date)
        try:
            self.snapshot_dir.mkdir(parents=True, exist_ok=True)
            with open(path, "x", encoding="utf-8", newline="\n") as fh:
                fh.write(snapshot.dumps())
        except FileExistsError:
            raise DuplicateDate(f"a snapshot for {snapshot.date} already exists in {self.root}") from None
        except OSError as exc:
            raise UnwritableStore(f"cannot write snapshot to {path}: {exc}") from exc
        return path

    def load(self, day: date) -> Snapshot:
        path = self._path(day)
        return Snapshot.loads(path.read_text(encoding="utf-8"), path)

    def snapshots(self) -> list[Snapshot]:
        return [self.load(d) for d in self.dates()]


@dataclass(frozen=True)
class PeriodDelta:
    start_date: date
    end_date: date
    per_article: Mapping[str, int]
    valid: bool = True
    invalid_reason: Optional[str] = None


def period_delta(earlier: Snapshot, later: Snapshot) -> PeriodDelta:
    """Usage accrued by each article between two snapshots.

    Articles first seen in ``later`` count from an implicit prior of zero.
    Articles missing from ``later`` are left out.
    """
    if earlier.date >= later.date:
        raise BadOrder(f"snapshot {earlier.date} is not before {later.date}")
    per_article = {
        article: count - earlier.usage.get(article, 0) for article, count in later.usage.items()
    }
    negative = any(d < 0 for d in per_article.values())
    return PeriodDelta(
        earlier.date,
        later.date,
        per_article,
        valid=not negative,
        invalid_reason=NEGATIVE_DELTA if negative else None,
    )


def parse_period(text: str) -> tuple[date, date]:
    """Parse ``YYYY-MM-DD..YYYY-MM-DD``."""
    match = _PERIOD.match(text)
    if match is None:
        raise ValueError(f"period must look like YYYY-MM-DD..YYYY-MM-DD, got {text!r}")
    start, end = (date.fromisoformat(g) for g in match.groups())
    if start >= end:
        raise ValueError(f"period start {start} is not before end {end}")
    return start, end


def _excluded(start: date, end: date, excluded: Iterable[tuple[date, date]]) -> bool:
    return any(lo <= start and end <= hi for lo, hi in excluded)


@dataclass(frozen=True)
class SeriesPoint:
    start: date
    end: date
    ratio2: float
    topic_usage: int
    period_usage: int
    flags: tuple[str, ...] = ()


@dataclass
class TopicSeries:
    topic: Topic
    points: list[SeriesPoint] = field(default_factory=list)
    classification: str = "inactive"

    @property
    def values(self) -> list[float]:
        return [p.ratio2 for p in self.points]


def ratio2_series(
    snapshots: Union[SnapshotStore, Sequence[Snapshot]],
    topics: Mapping[str, Iterable[str]],
    topic: str,
    excluded_periods: Iterable[tuple[date, date]] = (),
    include_invalid: bool = False,
) -> TopicSeries:
    """Per-period share of usage going to articles that carry ``topic``.

    ``topics`` maps accession id to that article's topic set (see
    ``usage.article_topics``). Articles absent from it still count toward
    each period's total. Periods falling inside an excluded range are
    skipped, as are periods with negative deltas unless ``include_invalid``
    is set. A period with no usage at all yields ratio2 = 0 flagged
    ``zero-denominator``.
    """
    if isinstance(snapshots, SnapshotStore):
        snapshots = snapshots.snapshots()
    snapshots = sorted(snapshots, key=lambda s: s.date)
    if len(snapshots) < 2:
        raise ValueError("need at least 2 snapshots to form a period")

    carriers = {article for article, ts in topics.items() if topic in ts}
    if not carriers:
        warnings.warn(f"topic {topic!r} appears in no record", UnknownTopic, stacklevel=2)
        return TopicSeries(Topic(topic), [], "inactive")

    excluded_periods = list(excluded_periods)
    points = []
    for earlier, later in zip(snapshots, snapshots[1:]):
        if _excluded(earlier.date, later.date, excluded_periods):
            continue
        delta = period_delta(earlier, later)
        flags = []
        if not delta.valid:
            if not include_invalid:
                continue
            flags.append(NEGATIVE_DELTA)
        denominator = sum(delta.per_article.values())
        numerator = sum(d for a, d in delta.per_article.items() if a in carriers)
        if denominator == 0:
            flags.append(ZERO_DENOMINATOR)
            ratio = 0.0
        else:
            ratio = numerator / denominator
        points.append(SeriesPoint(earlier.date, later.date, ratio, numerator, denominator, tuple(flags)))

    values = [p.ratio2 for p in points]
    label = classify_trend(values) if values else "inactive"
    return TopicSeries(Topic(topic), points, label)


def classify_trend(values: Sequence[float]) -> str:
    """Label a ratio2 series.

    The early and late windows are the first and last third of the points
    (at least two each, capped at the series length). Checks run in order:
    inactive, emerging, declining, stable (coefficient of variation at most
    0.35), otherwise volatile.
    """
    if not values:
        raise ValueError("cannot classify an empty series")
    if all(v < EPSILON for v in values):
        return "inactive"
    n = len(values)
    window = min(n, max(MIN_WINDOW, n // 3))
    early = statistics.fmean(values[:window])
    late = statistics.fmean(values[-window:])
    if late >= TREND_FACTOR * early and late >= EPSILON:
        return "emerging"
    if early >= TREND_FACTOR * late and early >= EPSILON:
        return "declining"
    mean = statistics.fmean(values)
    cv = statistics.pstdev(values) / mean if mean > 0 else math.inf
    return "stable" if cv <= CV_STABLE else "volatile"


SERIES_COLUMNS = ("topic", "period_start", "period_end", "ratio2", "flags")


def series_csv(series: Iterable[TopicSeries], with_classification: bool = False) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SERIES_COLUMNS + (("classification",) if with_classification else ()))
    for s in series:
        for p in s.points:
            row = [s.topic, p.start.isoformat(), p.end.isoformat(), repr(p.ratio2), ";".join(p.flags)]
            if with_classification:
                row.append(s.classification)
            writer.writerow(row)
    return buf.getvalue()


def series_json(series: Iterable[TopicSeries]) -> str:
    payload = [
        {
            "topic": s.topic,
            "classification": s.classification,
            "points": [
                {
                    "period_start": p.start.isoformat(),
                    "period_end": p.end.isoformat(),
                    "ratio2": p.ratio2,
                    "topic_usage": p.topic_usage,
                    "period_usage": p.period_usage,
                    "flags": list(p.flags),
                }
                for p in s.points
            ],
        }
        for s in series
    ]
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
