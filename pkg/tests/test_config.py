from datetime import date
from pathlib import Path

import pytest

from hottopics.config import ConfigError, RunConfig, load_config


def write(tmp_path, text):
    path = tmp_path / "hottopics.toml"
    path.write_text(text, encoding="utf-8")
    return path


def test_defaults(monkeypatch):
    monkeypatch.delenv("HOTTOPICS_STORE", raising=False)
    cfg = load_config(None)
    assert cfg == RunConfig()
    assert cfg.store == Path(".hottopics") and cfg.top_k == 20 and cfg.format == "csv"


def test_env_store(monkeypatch):
    monkeypatch.setenv("HOTTOPICS_STORE", "/data/store")
    assert load_config(None).store == Path("/data/store")


def test_file_store_beats_env(tmp_path, monkeypatch):
    monkeypatch.setenv("HOTTOPICS_STORE", "/data/store")
    assert load_config(write(tmp_path, 'store = "here"\n')).store == tmp_path / "here"


def test_full_file(tmp_path):
    cfg = load_config(write(tmp_path, """
store = "s"
corpus = "exports/a.txt"
stopwords = "/abs/stop.txt"
excluded_periods = ["2016-01-18..2016-01-25"]
top_k = 5
format = "json"
"""))
    assert cfg.corpus == (tmp_path / "exports" / "a.txt",)
    assert cfg.stopwords == Path("/abs/stop.txt")
    assert cfg.excluded_periods == ((date(2016, 1, 18), date(2016, 1, 25)),)
    assert (cfg.top_k, cfg.format) == (5, "json")


@pytest.mark.parametrize(
    "text",
    [
        "top_k = 'five'\n",
        "excluded_periods = ['2016-01-25..2016-01-18']\n",
        "nonsense = 1\n",
        "top_k = \n",
    ],
)
def test_rejected(tmp_path, text):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, text))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.toml")


def test_validate(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig(top_k=0).validate()
    with pytest.raises(ConfigError):
        RunConfig(format="xml").validate()
    with pytest.raises(ConfigError):
        RunConfig(synonyms=tmp_path / "missing.txt").validate()


def test_overrides_skip_none():
    cfg = RunConfig(top_k=5).with_overrides(top_k=None, format="json")
    assert (cfg.top_k, cfg.format) == (5, "json")
