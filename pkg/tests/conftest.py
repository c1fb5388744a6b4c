from __future__ import annotations

import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

from fountain_bfa.channel import symbols_from_matrix  # noqa: E402
from fountain_bfa.gf2 import BitMatrix  # noqa: E402

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

# five received symbols (a | y) with n = l = 2; rows 1 and 5 are the corrupted ones
TOY_ROWS = ["1101", "1011", "1110", "0101", "1000"]
TOY_N = 2
TOY_X = [[1, 1], [0, 1]]


@pytest.fixture
def toy_matrix() -> BitMatrix:
    return BitMatrix.from_strings(TOY_ROWS)


@pytest.fixture
def toy_symbols(toy_matrix):
    return symbols_from_matrix(toy_matrix, TOY_N)


# acceptance verdicts, printed once at the end of the session
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
