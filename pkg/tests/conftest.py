import pytest
from hypothesis import settings

from shoenfield import parse_program

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

ADD_SRC = """\
# R0 := R0 + R1, using R9 as scratch
0: DEC 1,3
1: INC 9
2: DEC 9,6
3: INC 0
4: INC 9
5: DEC 9,0
"""
COIN_SRC = "0: [1/2] INC 0 | [1/2] DEC 9,2\n"
TWO_THIRDS_SRC = "0: [1/3] INC 0 | [1/3] INC 0 | [1/3] DEC 9,2\n"
ONE_THIRD_SRC = "0: [1/3] INC 0 | [2/3] DEC 9,2\n"
LOOP_SRC = "0: INC 9\n1: DEC 9,0\n"


@pytest.fixture
def add_program():
    return parse_program(ADD_SRC).parsed


@pytest.fixture
def coin():
    return parse_program(COIN_SRC).parsed


@pytest.fixture
def two_thirds():
    return parse_program(TWO_THIRDS_SRC).parsed


@pytest.fixture
def one_third():
    return parse_program(ONE_THIRD_SRC).parsed


@pytest.fixture
def loop():
    return parse_program(LOOP_SRC).parsed


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
