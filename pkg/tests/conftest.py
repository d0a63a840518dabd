import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from crp import Bay  # noqa: E402


@pytest.fixture
def small_bay():
    # three columns, three tiers; bottom to top
    return Bay(3, [[4, 1, 6], [2, 5], [3]])


@pytest.fixture
def tall_bay():
    return Bay(4, [[3, 1, 5], [6, 2, 9], [8, 4, 7]])


@pytest.fixture
def tall_bay_moved():
    return Bay(4, [[3], [6, 2, 9, 5], [8, 4, 7]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_bay(rng, columns, tiers, n):
    """Random labels 1..n dropped into random non-full columns."""
    stacks = [[] for _ in range(columns)]
    for x in rng.permutation(n) + 1:
        open_cols = [i for i in range(columns) if len(stacks[i]) < tiers]
        stacks[open_cols[rng.integers(len(open_cols))]].append(int(x))
    return Bay(tiers, stacks)


ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line per criterion; lines are echoed live and
    repeated in the terminal summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE, [])
    tr = request.config.pluginmanager.get_plugin("terminalreporter")

    def emit(text):
        lines.append(text)
        if tr is not None:
            tr.write_line("")
            tr.write_line(text)
    return emit


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for ln in lines:
            terminalreporter.write_line(ln)
