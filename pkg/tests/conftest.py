import shutil
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"
MINI = Path(__file__).resolve().parents[1] / "data" / "mini"

_acceptance: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or report.outcome != "passed":
        _acceptance.setdefault(report.nodeid, (report.outcome, report.when))
        if report.outcome != "passed":
            _acceptance[report.nodeid] = (report.outcome, report.when)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, (outcome, _when) in _acceptance.items():
        name = nodeid.split("::")[-1]
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")


@pytest.fixture
def mini_collection(tmp_path) -> Path:
    """A private copy of the bundled synthetic collection."""
    dest = tmp_path / "mini"
    shutil.copytree(MINI, dest, ignore=shutil.ignore_patterns("out"))
    return dest
