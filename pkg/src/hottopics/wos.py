"""Reader and writer for the field-tagged plain-text bibliographic export.

Each line is a two-character tag, a space and a value. Continuation lines
start with exactly three spaces and extend the previous tag's value. ``ER``
closes a record and ``EF`` closes the file::

    FN Clarivate Analytics Web of Science
    VR 1.0
    PT J
    TI Brain mapping with
       functional imaging
    DE fMRI; brain
    U1 3
    U2 12
    UT WOS:000A
    ER

    EF

Author keywords (DE) and Keywords Plus (ID) are split on ``;``. The usage
counts U1 (last 180 days) and U2 (since 2013) default to 0 when absent.
Any other tag is kept verbatim in ``extra_fields`` so records survive a
parse/write round trip.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

__all__ = [
    "ArticleRecord",
    "ExportError",
    "MalformedRecord",
    "DuplicateAccession",
    "BadUsageValue",
    "parse_export",
    "write_export",
    "read_export",
]

HEADER_LINES = ("FN Clarivate Analytics Web of Science", "VR 1.0")
_FILE_TAGS = frozenset({"FN", "VR"})
_MODELED = frozenset({"UT", "TI", "DE", "ID", "PY", "U1", "U2"})
_TAG_LINE = re.compile(r"^([A-Z][A-Z0-9])(?: (.*))?$")
_CONTINUATION = "   "


class ExportError(ValueError):
    """Base class for export parsing failures. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: Optional[int] = None, source: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.source = source

    def __str__(self) -> str:
        where = "".join(
            f"{part}:" for part in (self.source, self.line) if part is not None
        )
        return f"{where} {self.message}" if where else self.message


class MalformedRecord(ExportError):
    """Truncated or structurally invalid export."""


class DuplicateAccession(ExportError):
    """Two records in one file share a UT accession number."""


class BadUsageValue(ExportError):
    """U1 or U2 present but not a non-negative integer."""


@dataclass
class ArticleRecord:
    accession_id: str
    title: str = ""
    author_keywords: list[str] = field(default_factory=list)
    keywords_plus: list[str] = field(default_factory=list)
    pub_year: Optional[int] = None
    usage_180d: int = 0
    usage_since_2013: int = 0
    extra_fields: dict[str, str] = field(default_factory=dict)


def _split_keywords(value: str) -> list[str]:
    return [part.strip() for part in value.split(";") if part.strip()]


def _usage(tag: str, value: str, line: int) -> int:
    if not re.fullmatch(r"[0-9]+", value):
        raise BadUsageValue(f"{tag} must be a non-negative integer, got {value!r}", line)
    return int(value)


def _build_record(fields: dict[str, str], lines: dict[str, int], start: int) -> ArticleRecord:
    accession = fields.get("UT", "")
    if not accession:
        raise MalformedRecord("record has no UT accession number", start)
    year = None
    if "PY" in fields:
        if not re.fullmatch(r"[0-9]{1,4}", fields["PY"]):
            raise MalformedRecord(f"PY is not a year: {fields['PY']!r}", lines["PY"])
        year = int(fields["PY"])
    return ArticleRecord(
        accession_id=accession,
        title=fields.get("TI", ""),
        author_keywords=_split_keywords(fields.get("DE", "")),
        keywords_plus=_split_keywords(fields.get("ID", "")),
        pub_year=year,
        usage_180d=_usage("U1", fields["U1"], lines["U1"]) if "U1" in fields else 0,
        usage_since_2013=_usage("U2", fields["U2"], lines["U2"]) if "U2" in fields else 0,
        extra_fields={tag: value for tag, value in fields.items() if tag not in _MODELED},
    )


def parse_export(text: str, source: Optional[str] = None) -> list[ArticleRecord]:
    """Parse a whole export file into records, preserving file order.

    Raises MalformedRecord when a record is not closed by ``ER`` or the file
    lacks ``EF``; DuplicateAccession and BadUsageValue as their names say.
    ``source`` is only used to label error messages.
    """
    if text.startswith("\ufeff"):
        text = text[1:]
    records: list[ArticleRecord] = []
    seen: dict[str, int] = {}
    fields: Optional[dict[str, str]] = None
    lines: dict[str, int] = {}
    start = 0
    last_tag: Optional[str] = None
    ended = False
    raw_lines = text.split("\n")

    try:
        for lineno, raw in enumerate(raw_lines, start=1):
            line = raw.rstrip("\r")
            if not line.strip():
                last_tag = None
                continue
            if line.startswith(_CONTINUATION):
                if fields is None or last_tag is None:
                    raise MalformedRecord("continuation line outside a field", lineno)
                fields[last_tag] = f"{fields[last_tag]} {line.strip()}".strip()
                continue
            match = _TAG_LINE.match(line.rstrip())
            if match is None:
                raise MalformedRecord(f"unrecognised line {line[:40]!r}", lineno)
            tag, value = match.group(1), (match.group(2) or "").strip()

            if tag == "EF":
                if fields is not None:
                    raise MalformedRecord("EF reached inside an unterminated record", start)
                ended = True
                break
            if tag == "ER":
                if fields is None:
                    raise MalformedRecord("ER without an open record", lineno)
                record = _build_record(fields, lines, start)
                if record.accession_id in seen:
                    raise DuplicateAccession(
                        f"accession {record.accession_id} already defined on line "
                        f"{seen[record.accession_id]}",
                        start,
                    )
                seen[record.accession_id] = start
                records.append(record)
                fields, last_tag = None, None
                continue
            if fields is None:
                if tag in _FILE_TAGS and not records:
                    last_tag = None
                    continue
                fields, lines, start = {}, {}, lineno
            if tag in fields:
                raise MalformedRecord(f"tag {tag} repeated within a record", lineno)
            fields[tag] = value
            lines[tag] = lineno
            last_tag = tag
    except ExportError as exc:
        exc.source = source
        raise

    if fields is not None:
        raise MalformedRecord("input ended inside a record (missing ER)", start, source)
    if not ended:
        raise MalformedRecord("missing EF file terminator", len(raw_lines), source)
    return records


def read_export(path: Union[str, Path]) -> list[ArticleRecord]:
    """Read and parse an export file. Bytes must be valid UTF-8."""
    path = Path(path)
    data = path.read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedRecord(f"not valid UTF-8 at byte {exc.start}", None, str(path)) from None
    return parse_export(text, source=str(path))


def _record_lines(record: ArticleRecord) -> Iterable[str]:
    if record.title:
        yield f"TI {record.title}"
    for tag, value in record.extra_fields.items():
        yield f"{tag} {value}".rstrip()
    if record.author_keywords:
        yield "DE " + "; ".join(record.author_keywords)
    if record.keywords_plus:
        yield "ID " + "; ".join(record.keywords_plus)
    if record.pub_year is not None:
        yield f"PY {record.pub_year}"
    yield f"U1 {record.usage_180d}"
    yield f"U2 {record.usage_since_2013}"
    yield f"UT {record.accession_id}"
    yield "ER"


def write_export(records: Iterable[ArticleRecord]) -> str:
    out = list(HEADER_LINES)
    for record in records:
        out.extend(_record_lines(record))
        out.append("")
    out.append("EF")
    return "\n".join(out) + "\n"
