"""Run configuration loaded from a TOML file, with command-line overrides.

Example ``hottopics.toml``::

    store = "store"
    corpus = ["exports/2016-03-21.txt"]
    stopwords = "tables/stopwords.txt"
    synonyms = "tables/synonyms.txt"
    excluded_periods = ["2016-01-18..2016-01-25", "2016-03-14..2016-03-21"]
    top_k = 20
    format = "csv"

Relative paths are resolved against the directory holding the file.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, replace
from datetime import date
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .snapshots import parse_period

STORE_ENV = "HOTTOPICS_STORE"
DEFAULT_STORE = Path(".hottopics")
FORMATS = ("csv", "json")
_KEYS = {"store", "corpus", "stopwords", "synonyms", "excluded_periods", "top_k", "format"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    store: Path = DEFAULT_STORE
    corpus: tuple[Path, ...] = ()
    stopwords: Optional[Path] = None
    synonyms: Optional[Path] = None
    excluded_periods: tuple[tuple[date, date], ...] = ()
    top_k: int = 20
    format: str = "csv"

    def validate(self) -> "RunConfig":
        if self.top_k < 1:
            raise ConfigError(f"top_k must be at least 1, got {self.top_k}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}, got {self.format!r}")
        for path in (*self.corpus, self.stopwords, self.synonyms):
            if path is not None and not path.exists():
                raise ConfigError(f"referenced file does not exist: {path}")
        return self

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def load_config(path: Optional[Path]) -> RunConfig:
    """Read ``path`` (or return defaults), then apply the store env var fallback."""
    values: dict[str, Any] = {}
    if path is not None:
        try:
            raw = tomllib.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        unknown = set(raw) - _KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        base = Path(path).parent
        values = _convert(raw, base)
    if "store" not in values and os.environ.get(STORE_ENV):
        values["store"] = Path(os.environ[STORE_ENV])
    return RunConfig(**values)


def _convert(raw: dict[str, Any], base: Path) -> dict[str, Any]:
    def resolve(p: str) -> Path:
        return base / Path(p).expanduser()

    out: dict[str, Any] = {}
    try:
        if "store" in raw:
            out["store"] = resolve(raw["store"])
        if "corpus" in raw:
            corpus = raw["corpus"]
            out["corpus"] = tuple(resolve(p) for p in ([corpus] if isinstance(corpus, str) else corpus))
        for key in ("stopwords", "synonyms"):
            if key in raw:
                out[key] = resolve(raw[key])
        if "excluded_periods" in raw:
            out["excluded_periods"] = tuple(parse_period(p) for p in raw["excluded_periods"])
        if "top_k" in raw:
            if not isinstance(raw["top_k"], int):
                raise ConfigError("top_k must be an integer")
            out["top_k"] = raw["top_k"]
        if "format" in raw:
            out["format"] = str(raw["format"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return out
