import numpy as np
import pytest

from ptcomb.lattice import UnitCell, make_pt_cell


def random_pt_cell(rng, n, r=(-5.0, 10.0), s=(-25.0, 25.0)):
    half = [(rng.uniform(*r), rng.uniform(*s)) for _ in range(n // 2)]
    middle = rng.uniform(*r) if n % 2 else None
    if not half:
        return UnitCell([(middle, 0.0)])
    return make_pt_cell(half, middle)


def random_cell(rng, n, r=(-5.0, 10.0), s=(-25.0, 25.0)):
    return UnitCell([(rng.uniform(*r), rng.uniform(*s)) for _ in range(n)])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
