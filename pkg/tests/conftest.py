import pytest

from qualgame.fixtures import fixture_text
from qualgame.game import parse_game


def load(name):
    return parse_game(fixture_text(name))


@pytest.fixture
def mp():
    return load("matching_pennies")


@pytest.fixture
def fig2():
    return load("fig2")


@pytest.fixture
def fig3():
    return load("fig3")


@pytest.fixture
def fig4():
    return load("fig4")


def det_game(layout, priorities, names=None):
    """Tiny deterministic game builder.

    ``layout[s]`` is a list of rows, one per player-1 action, each listing the
    successor index (or a tuple of indices) per player-2 action.
    """
    from qualgame.game import ConcurrentGame, SuccessorDist

    n = len(layout)
    names = names or tuple(f"s{i}" for i in range(n))
    delta, m1, m2 = [], [], []
    for rows in layout:
        m1.append(tuple(f"a{i}" for i in range(len(rows))))
        m2.append(tuple(f"b{i}" for i in range(len(rows[0]))))
        out_rows = []
        for row in rows:
            cells = []
            for t in row:
                ts = (t,) if isinstance(t, int) else tuple(t)
                cells.append(SuccessorDist(tuple((x, 1.0 / len(ts)) for x in ts)))
            out_rows.append(tuple(cells))
        delta.append(tuple(out_rows))
    return ConcurrentGame(tuple(names), tuple(priorities), tuple(m1), tuple(m2), tuple(delta))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
