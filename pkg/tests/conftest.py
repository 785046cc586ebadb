import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from lil.algebra import DigraphAlgebra, Pattern
from lil.suite import random_pattern

settings.register_profile("lil", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lil")

ACCEPTANCE_LINES = []


def patterns(min_n=1, max_n=5):
    """Hypothesis strategy: random valid patterns (random block DAG, closed, relabeled)."""
    return st.builds(lambda n, seed: random_pattern(n, random.Random(seed)),
                     st.integers(min_n, max_n), st.integers(0, 2**32 - 1))


def algebras(min_n=1, max_n=5):
    return patterns(min_n, max_n).map(DigraphAlgebra)


@pytest.fixture
def t2():
    return DigraphAlgebra.upper_triangular(2)


@pytest.fixture
def t3():
    return DigraphAlgebra.upper_triangular(3)


@pytest.fixture
def m2():
    return DigraphAlgebra.full(2)


@pytest.fixture
def blocks4():
    """4x4 pattern with blocks {1,2}, {3}, {4} and corner ({1,2}, {3})."""
    return DigraphAlgebra(Pattern.from_rows(["***.", "***.", "..*.", "...*"]))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
