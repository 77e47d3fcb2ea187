import random
from fractions import Fraction as F

import pytest


def rand_rational(rng, lo=-4, hi=4, dens=(1, 2, 3, 4)):
    return F(rng.randint(lo * 12, hi * 12), 12) if rng.random() < 0.3 else F(rng.randint(lo, hi), rng.choice(dens))


def rand_interval(rng, max_len=3):
    a = rand_rational(rng)
    return a, a + F(rng.randint(1, 4 * max_len), 4)


@pytest.fixture
def rng():
    return random.Random(20240611)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
