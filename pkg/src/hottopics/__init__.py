"""Hot topic detection and tracking from bibliographic records with usage counts."""

__version__ = "0.1.0"

from .keywords import EmptyYield, Pipeline, SynonymTable, StopwordList, Topic, stem_phrase, topics_of
from .porter import stem_word
from .snapshots import Snapshot, SnapshotStore, classify_trend, period_delta, ratio2_series
from .usage import TopicStats, aggregate, quadrants, top_by_frequency, top_by_usage
from .wos import ArticleRecord, parse_export, read_export, write_export

__all__ = [
    "ArticleRecord",
    "EmptyYield",
    "Pipeline",
    "Snapshot",
    "SnapshotStore",
    "StopwordList",
    "SynonymTable",
    "Topic",
    "TopicStats",
    "aggregate",
    "classify_trend",
    "parse_export",
    "period_delta",
    "quadrants",
    "ratio2_series",
    "read_export",
    "stem_phrase",
    "stem_word",
    "top_by_frequency",
    "top_by_usage",
    "topics_of",
    "write_export",
]
