import numpy as np
import pytest

from coalsynth.blocksworld import build_blocksworld
from coalsynth.game import load_problem
from coalsynth.product import build_product
from coalsynth.synthesis import synthesize
from coalsynth.values import value_table

DATA = __import__("pathlib").Path(__file__).parent / "data"


def problem(name):
    return load_problem((DATA / name).read_text())


@pytest.fixture(scope="session")
def bw_spec():
    return build_blocksworld()


@pytest.fixture(scope="session")
def bw_product(bw_spec):
    return build_product(bw_spec)


@pytest.fixture(scope="session")
def bw_values(bw_product):
    return value_table(bw_product)


@pytest.fixture(scope="session")
def bw_solution(bw_product, bw_values):
    return synthesize(bw_product, bw_values)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# seeds of dense, single-controller random instances whose solution discards candidates
DISCARD_SEEDS = (1144, 1285, 1309, 1916, 2210, 2410, 2882)


def discard_instance(seed):
    from coalsynth.oracle import random_problem
    return build_product(random_problem(np.random.default_rng(seed), owned=True, dense=True))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
