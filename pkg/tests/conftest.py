import pytest

from helpers import corpus

_CRITERIA = {}


@pytest.fixture(scope="session")
def compact_corpus():
    """100 tracked runs of random feasible 10-piece data with zero far states."""
    return corpus(seed=1, count=100)


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA):
        number = int(name.split("_")[2])
        status = "PASS" if _CRITERIA[name] == "passed" else "FAIL"
        label = " ".join(name.split("_")[3:])
        terminalreporter.write_line(f"criterion {number:2d} {status}  {label}")
