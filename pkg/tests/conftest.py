import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from structsum import synthetic  # noqa: E402
from structsum.corpus import pair_corpus  # noqa: E402


@pytest.fixture(scope="session")
def corpus20():
    records, articles = synthetic.make_corpus(20, seed=11)
    return records, articles, pair_corpus(records, articles).examples


@pytest.fixture
def corpus_dir(tmp_path):
    records, articles = synthetic.make_corpus(20, seed=5)
    snapshot, texts = synthetic.write_corpus(tmp_path, records, articles)
    return tmp_path, records, articles


_criteria: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion reported in the terminal summary")


def pytest_runtest_logreport(report):
    name = report.__dict__.get("criterion")
    if name is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria[name] = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().__dict__["criterion"] = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _criteria.items():
        terminalreporter.write_line(f"{status}  {name}")
