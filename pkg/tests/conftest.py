import random
import sys

import pytest

from pmdsarray.pmds import build_c2, build_c3, build_c4


@pytest.fixture(scope="session")
def c2_small():
    return build_c2(2, 4, 2, 2, q=13)


@pytest.fixture(scope="session")
def c3_small():
    return build_c3(2, 4, q=13)


@pytest.fixture(scope="session")
def c4_small():
    return build_c4(2, 4, 2, 2)


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
