from __future__ import annotations

from importlib import resources
from pathlib import Path

import pytest


def pytest_addoption(parser):
    parser.addoption(
        "--paper-snapshot",
        default=None,
        help="era-matched snapshot (json/csv/dir) enabling the era-dependent acceptance checks",
    )


@pytest.fixture
def bundled_fixture() -> Path:
    return Path(str(resources.files("tagtaxa") / "data" / "fixture12.json"))


def pytest_terminal_summary(terminalreporter):
    from .helpers import ACCEPTANCE

    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, status, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n:>2}: {status:<4} {detail}")
