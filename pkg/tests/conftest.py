import os

import pytest

# one line per acceptance criterion, printed after the run
_LINES: list[str] = []

os.environ.setdefault("DELEGATION_LAB_THREADS", "0")


class Recorder:
    def __call__(self, label: str, ok: bool, detail: str = "") -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else "")
        _LINES.append(line)
        print(line)
        return ok


@pytest.fixture
def criterion():
    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
