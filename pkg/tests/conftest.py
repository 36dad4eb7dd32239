import contextlib

import pytest

_RESULTS: dict = {}


class Criteria:
    """Collects one pass/fail line per acceptance criterion."""

    @contextlib.contextmanager
    def check(self, number: int, title: str):
        detail = {"text": ""}
        try:
            yield detail
        except BaseException:
            _RESULTS[number] = (False, title, detail["text"])
            raise
        _RESULTS[number] = (True, title, detail["text"])


@pytest.fixture(scope="session")
def criteria():
    return Criteria()


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        ok, title, text = _RESULTS[number]
        line = f"{'PASS' if ok else 'FAIL'}  {number:>2}. {title}"
        if text:
            line += f"  [{text}]"
        terminalreporter.write_line(line)
