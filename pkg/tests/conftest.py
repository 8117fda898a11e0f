import numpy as np
import pytest

from idesimrank.graph import EdgeSet, build_graph


def random_graph(n, density=0.15, c=0.6, seed=0, self_loops=True):
    """Erdos-Renyi style digraph; dangling vertices are left in on purpose."""
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < density
    if not self_loops:
        np.fill_diagonal(mask, False)
    src, dst = np.nonzero(mask)
    return build_graph(EdgeSet.from_pairs(np.column_stack([src, dst]), n=n), c=c)


def seeded_graphs(count, n_lo, n_hi, c=0.6, seed=1234):
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        n = int(rng.integers(n_lo, n_hi + 1))
        density = float(rng.uniform(0.05, 0.4))
        out.append(random_graph(n, density, c=c, seed=seed + 17 * k + 1))
    return out


@pytest.fixture
def two_cycle():
    return build_graph(EdgeSet.from_pairs([(0, 1), (1, 0)]), c=0.6)


@pytest.fixture
def self_loop():
    return build_graph(EdgeSet.from_pairs([(0, 0)]), c=0.6)


@pytest.fixture
def out_star():
    return build_graph(EdgeSet.from_pairs([(0, 1), (0, 2)]), c=0.6)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
