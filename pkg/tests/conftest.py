import functools

import pytest

from hellycert.instances import OCTAGON, UNIT_SQUARE, gen_box, gen_critical, gen_lifted, gen_simplex_validity


@functools.lru_cache(maxsize=None)
def bundle(name, n):
    gens = {"box": gen_box, "simplex": gen_simplex_validity, "critical": gen_critical,
            "lifted": lambda k: gen_lifted(OCTAGON, k), "lifted-square": lambda k: gen_lifted(UNIT_SQUARE, k)}
    return gens[name](n)


@pytest.fixture(scope="session")
def corpus():
    """Small instances with every emitted certificate."""
    keys = [("box", 1), ("box", 2), ("simplex", 1), ("simplex", 2), ("critical", 1), ("critical", 2),
            ("lifted-square", 3)]
    return [bundle(*k) for k in keys]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
