from pathlib import Path

import pytest

from hottopics import Pipeline, read_export

DATA = Path(__file__).parent / "data"

_acceptance_results: list[tuple[str, bool, str]] = []


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def pipeline():
    return Pipeline.default()


@pytest.fixture(scope="session")
def fixture_records():
    return read_export(DATA / "fixture_corpus.txt")


@pytest.fixture
def criterion(request):
    """Record the outcome of one acceptance criterion for the summary table."""
    label = request.node.get_closest_marker("criterion").args[0]
    notes = []
    yield notes
    rep = getattr(request.node, "rep_call", None)
    passed = rep is not None and rep.passed
    _acceptance_results.append((label, passed, "; ".join(notes)))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, note in _acceptance_results:
        line = f"{'PASS' if passed else 'FAIL'}  {label}"
        if note:
            line += f"  ({note})"
        terminalreporter.write_line(line)
