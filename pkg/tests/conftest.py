from __future__ import annotations

from pathlib import Path

import pytest

from hurwitzkit.cgraph import EquippedGroup
from hurwitzkit.groups import close_generators, parse_cycles

ACCEPTANCE_LINES: list[str] = []

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def group(degree: int, *gens):
    """``group(3, "(1 2)", "(1 2 3)")`` or ``group(3, ["(1 2)", "(1 2 3)"])``."""
    flat = [g for x in gens for g in ([x] if isinstance(x, str) else x)]
    return close_generators([parse_cycles(g, degree) for g in flat], degree=degree)


def equip(degree: int, gens: list[str], reps: list[str]) -> EquippedGroup:
    return EquippedGroup.from_representatives(group(degree, *gens), reps)


S3 = (3, ["(1 2)", "(1 2 3)"])
S4 = (4, ["(1 2)", "(1 2 3 4)"])
A4 = (4, ["(1 2 3)", "(2 3 4)"])
D4 = (4, ["(1 2 3 4)", "(1 3)"])
Q8 = (8, ["(1 2 3 4)(5 6 7 8)", "(1 5 3 7)(2 8 4 6)"])
Q8_IJK = ["(1 2 3 4)(5 6 7 8)", "(1 5 3 7)(2 8 4 6)", "(1 8 3 6)(2 7 4 5)"]


@pytest.fixture(scope="session")
def s3():
    return equip(*S3, ["(1 2)"])


@pytest.fixture(scope="session")
def s4():
    return equip(*S4, ["(1 2)"])


@pytest.fixture(scope="session")
def s4_mixed():
    return equip(*S4, ["(1 2)", "(1 2 3)"])


@pytest.fixture(scope="session")
def a4():
    return equip(*A4, ["(1 2 3)"])


@pytest.fixture(scope="session")
def d4():
    return equip(*D4, ["(1 2 3 4)", "(1 3)"])


@pytest.fixture(scope="session")
def q8():
    return equip(*Q8, Q8_IJK)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
