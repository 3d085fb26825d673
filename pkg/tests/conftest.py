"""Acceptance summary: one PASS/FAIL line per criterion at the end of the run."""

import pytest

_labels: dict[str, str] = {}
_results: dict[str, tuple[str, str]] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark is not None:
            _labels[item.nodeid] = mark.args[0] if mark.args else item.name


def pytest_runtest_logreport(report):
    if report.nodeid not in _labels:
        return
    detail = "; ".join(str(v) for k, v in report.user_properties if k == "detail")
    if report.failed:
        _results[report.nodeid] = ("FAIL", detail)
    elif report.skipped:
        _results[report.nodeid] = ("SKIP", detail)
    elif report.when == "call" and report.nodeid not in _results:
        _results[report.nodeid] = ("PASS", detail)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, label in _labels.items():
        if nodeid not in _results:
            continue
        status, detail = _results[nodeid]
        line = f"{status}  {label}"
        terminalreporter.write_line(f"{line}  ({detail})" if detail else line)


@pytest.fixture
def detail(record_property):
    """Attach a short note to the acceptance summary line."""

    def note(text: str) -> None:
        record_property("detail", text)

    return note
