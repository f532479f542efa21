from __future__ import annotations

import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
FIXTURES = HERE / "fixtures"
sys.path.insert(0, str(HERE))

from disembed.tree import read_documents  # noqa: E402


def load_doc(name: str):
    """First document of a fixture tree file."""
    return read_documents((FIXTURES / name).read_text(encoding="utf-8"))[0]


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture
def treasury():
    return load_doc("treasury.ptb")


@pytest.fixture
def sotomayor():
    return load_doc("sotomayor.ptb")


@pytest.fixture
def red_spot():
    return load_doc("great_red_spot.ptb")


@pytest.fixture
def corpus():
    return read_documents((FIXTURES / "corpus.ptb").read_text(encoding="utf-8"))


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[key])
