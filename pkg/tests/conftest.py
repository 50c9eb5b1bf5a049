import functools

import numpy as np
import pytest

from hyperlat.lattice import build_layout, medial_graph

ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def lattice(p, shells):
    return medial_graph(build_layout(p, shells))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
