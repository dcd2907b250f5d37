"""Command-line interface.

    hottopics [--config FILE] [--store DIR] [--format csv|json] COMMAND ...

Commands:
  ingest FILE... --date YYYY-MM-DD   merge exports into the store and record a usage snapshot
  topics [--by freq|usage] [--top K] ranked topic table
  quadrant [--top K]                  top-K topics split by frequency/usage membership (JSON)
  trends TOPIC...                     per-period usage share series with trend labels
  export --out DIR                    write corpus, tables, quadrants and trends to DIR

The store directory falls back to $HOTTOPICS_STORE, then ``./.hottopics``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from datetime import date
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .config import FORMATS, ConfigError, RunConfig, load_config
from .keywords import EmptyYield, Pipeline, TableError
from .snapshots import (
    DuplicateDate,
    Snapshot,
    SnapshotStore,
    UnwritableStore,
    parse_period,
    ratio2_series,
    series_csv,
    series_json,
)
from .usage import (
    EmptyCorpus,
    ZeroUsageCorpus,
    aggregate,
    article_topics,
    quadrants,
    quadrants_json,
    table_csv,
    table_json,
    top_by_frequency,
    top_by_usage,
)
from .wos import ArticleRecord, ExportError, read_export, write_export

log = logging.getLogger("hottopics")


class CommandError(Exception):
    """Failure that should end the command with a message and exit code 1."""


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _iso_date(text: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a YYYY-MM-DD date: {text!r}") from None


def _period(text: str):
    try:
        return parse_period(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=argparse.SUPPRESS, help="TOML run configuration")
    common.add_argument("--store", type=Path, default=argparse.SUPPRESS, help="store directory")
    common.add_argument("--format", choices=FORMATS, default=argparse.SUPPRESS, help="output format")
    common.add_argument("--stopwords", type=Path, default=argparse.SUPPRESS, help="stopword list file")
    common.add_argument("--synonyms", type=Path, default=argparse.SUPPRESS, help="synonym table file")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="hottopics",
        parents=[common],
        description="Detect and track hot topics from bibliographic exports with usage counts.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("ingest", parents=[common], help="ingest export files as one dated snapshot")
    p.add_argument("files", nargs="+", type=Path)
    p.add_argument("--date", required=True, type=_iso_date, help="snapshot date, YYYY-MM-DD")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("topics", parents=[common], help="ranked topic table")
    p.add_argument("--by", choices=("freq", "usage"), default="usage")
    p.add_argument("--top", type=_positive_int, default=None, help="number of rows (default: config top_k)")
    p.set_defaults(func=cmd_topics)

    p = sub.add_parser("quadrant", parents=[common], help="frequency vs usage top-K comparison")
    p.add_argument("--top", type=_positive_int, default=None)
    p.set_defaults(func=cmd_quadrant)

    p = sub.add_parser("trends", parents=[common], help="usage share series per topic")
    p.add_argument("topics", nargs="+")
    p.add_argument("--exclude", type=_period, action="append", default=[], metavar="START..END",
                   help="drop periods inside this range (repeatable)")
    p.add_argument("--include-invalid", action="store_true",
                   help="keep periods whose cumulative counts went down")
    p.set_defaults(func=cmd_trends)

    p = sub.add_parser("export", parents=[common], help="write all outputs to a directory")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--top", type=_positive_int, default=None)
    p.set_defaults(func=cmd_export)
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(getattr(args, "config", None))
    cfg = cfg.with_overrides(
        store=getattr(args, "store", None),
        format=getattr(args, "format", None),
        stopwords=getattr(args, "stopwords", None),
        synonyms=getattr(args, "synonyms", None),
        top_k=getattr(args, "top", None),
    )
    return cfg.validate()


def _pipeline(cfg: RunConfig) -> Pipeline:
    return Pipeline.from_paths(cfg.stopwords, cfg.synonyms)


def _merge(batches: Sequence[Sequence[ArticleRecord]]) -> tuple[list[ArticleRecord], int]:
    """Merge record lists by accession id; later lists win. Returns (records, duplicates)."""
    merged: dict[str, ArticleRecord] = {}
    duplicates = 0
    for batch in batches:
        for record in batch:
            if record.accession_id in merged:
                duplicates += 1
            merged[record.accession_id] = record
    return list(merged.values()), duplicates


def _corpus(cfg: RunConfig) -> list[ArticleRecord]:
    if cfg.corpus:
        records, _ = _merge([read_export(p) for p in cfg.corpus])
    else:
        records = SnapshotStore(cfg.store).read_corpus()
    if not records:
        raise CommandError(f"corpus is empty (store {cfg.store}); run 'hottopics ingest' first")
    return records


def _stats(records, pipeline):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ZeroUsageCorpus)
        stats = aggregate(records, pipeline)
    for w in caught:
        log.warning("%s", w.message)
    return stats


def cmd_ingest(args: argparse.Namespace, cfg: RunConfig) -> str:
    store = SnapshotStore(cfg.store)
    if args.date in store:
        raise DuplicateDate(f"a snapshot for {args.date} already exists in {store.root}")
    batches = [read_export(path) for path in args.files]
    records, duplicates = _merge(batches)
    pipeline = _pipeline(cfg)
    empty = []
    for record in records:
        try:
            pipeline.topics_of(record)
        except EmptyYield:
            empty.append(record.accession_id)

    snapshot = Snapshot(
        args.date,
        {r.accession_id: r.usage_since_2013 for r in records},
        source_file=args.files[-1],
    )
    store.add(snapshot)
    corpus, _ = _merge([store.read_corpus(), records])
    store.write_corpus(corpus)

    report = {
        "date": args.date.isoformat(),
        "records": len(records),
        "duplicates": duplicates,
        "no_keywords": empty,
        "corpus_size": len(corpus),
        "snapshots": len(store),
    }
    if cfg.format == "json":
        return json.dumps(report, indent=2) + "\n"
    lines = [
        f"{len(records)} records, {duplicates} duplicates",
        f"snapshot {args.date.isoformat()} stored ({len(store)} snapshots, corpus {len(corpus)} records)",
    ]
    if empty:
        lines.append(f"{len(empty)} records without keywords: {', '.join(empty)}")
    return "\n".join(lines) + "\n"


def cmd_topics(args: argparse.Namespace, cfg: RunConfig) -> str:
    stats = _stats(_corpus(cfg), _pipeline(cfg))
    rank = top_by_usage if args.by == "usage" else top_by_frequency
    ranked = rank(stats, cfg.top_k)
    return table_json(ranked) if cfg.format == "json" else table_csv(ranked)


def cmd_quadrant(args: argparse.Namespace, cfg: RunConfig) -> str:
    stats = _stats(_corpus(cfg), _pipeline(cfg))
    return quadrants_json(quadrants(stats, cfg.top_k))


def _trend_series(store, records, pipeline, requested, excluded, include_invalid):
    snapshots = store.snapshots()
    if len(snapshots) < 2:
        raise CommandError(f"need ≥ 2 snapshots, store {store.root} has {len(snapshots)}")
    topics = article_topics(records, pipeline)
    known = set().union(*topics.values()) if topics else set()
    out = []
    for name in requested:
        topic = name if name in known else pipeline.canonical(name)
        if topic not in known:
            log.warning("unknown topic %r: carried by no article, skipped", name)
            continue
        out.append(ratio2_series(snapshots, topics, topic, excluded, include_invalid))
    return out


def cmd_trends(args: argparse.Namespace, cfg: RunConfig) -> str:
    store = SnapshotStore(cfg.store)
    excluded = list(cfg.excluded_periods) + list(args.exclude)
    series = _trend_series(
        store, _corpus(cfg), _pipeline(cfg), args.topics, excluded, args.include_invalid
    )
    if not series:
        raise CommandError("none of the requested topics is known")
    return series_json(series) if cfg.format == "json" else series_csv(series, with_classification=True)


def cmd_export(args: argparse.Namespace, cfg: RunConfig) -> str:
    records = _corpus(cfg)
    pipeline = _pipeline(cfg)
    stats = _stats(records, pipeline)
    ext = cfg.format
    emit = table_json if ext == "json" else table_csv
    by_usage = top_by_usage(stats, cfg.top_k)
    outputs = {
        "corpus.txt": write_export(records),
        f"top_frequency.{ext}": emit(top_by_frequency(stats, cfg.top_k)),
        f"top_usage.{ext}": emit(by_usage),
        "quadrant.json": quadrants_json(quadrants(stats, cfg.top_k)),
    }
    store = SnapshotStore(cfg.store)
    if len(store) >= 2:
        series = _trend_series(
            store, records, pipeline, [s.topic for s in by_usage], cfg.excluded_periods, False
        )
        outputs[f"trends.{ext}"] = (
            series_json(series) if ext == "json" else series_csv(series, with_classification=True)
        )
    else:
        log.warning("fewer than 2 snapshots; trends not exported")
    args.out.mkdir(parents=True, exist_ok=True)
    for name, text in outputs.items():
        (args.out / name).write_text(text, encoding="utf-8", newline="\n")
    return "".join(f"{args.out / name}\n" for name in outputs)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.INFO,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        cfg = _config(args)
        output = args.func(args, cfg)
    except (CommandError, ConfigError, ExportError, TableError, DuplicateDate,
            UnwritableStore, EmptyCorpus, OSError) as exc:
        kind = "" if isinstance(exc, CommandError) else f"{type(exc).__name__}: "
        print(f"error: {kind}{exc}", file=sys.stderr)
        return 1
    sys.stdout.write(output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
