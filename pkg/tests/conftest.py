import json
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

import cvol  # noqa: E402
from cvol.volume import default_shapes  # noqa: E402

# known values for the 5_2 knot complement
VOL_52 = 2.828122088330783
CS_52 = 3.024128376509301
CS_52_REAL = -1.1134545524739240

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def five_two():
    return cvol.load_fixture("five_two")


@pytest.fixture(scope="session")
def figure_eight():
    return cvol.load_fixture("figure_eight")


@pytest.fixture(scope="session")
def five_two_shapes(five_two):
    return default_shapes(five_two)


@pytest.fixture(scope="session")
def figure_eight_shapes(figure_eight):
    return default_shapes(figure_eight)


@pytest.fixture
def five_two_data():
    return json.loads(cvol.fixture_path("five_two").read_text())


@pytest.fixture
def record_acceptance():
    def record(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
