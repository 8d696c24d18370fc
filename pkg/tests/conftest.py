from __future__ import annotations

import pytest

from ctoqw.graph import Graph, generate

from helpers import ACCEPTANCE_RESULTS


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        status, title = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"[{status}] criterion {number:2d}: {title}")


@pytest.fixture
def path3() -> Graph:
    return generate("path", 3)


@pytest.fixture
def claw() -> Graph:
    return generate("star", 3)


@pytest.fixture
def cycle3() -> Graph:
    return generate("cycle", 3)
