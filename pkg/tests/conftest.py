import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from csrgame.graph import Graph, load_graph

# criterion id -> (passed, detail); filled by test_acceptance, printed at the end
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


@st.composite
def connected_graphs(draw, min_n=1, max_n=12):
    """A random spanning tree plus a random set of extra edges."""
    n = draw(st.integers(min_n, max_n))
    edges = set()
    for v in range(2, n + 1):
        edges.add((draw(st.integers(1, v - 1)), v))
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    if pairs:
        extra = draw(st.lists(st.sampled_from(pairs), max_size=2 * n))
        edges.update(extra)
    return load_graph(sorted(edges), n)


@st.composite
def graph_and_profile(draw, min_n=1, max_n=12, max_k=4):
    g = draw(connected_graphs(min_n, max_n))
    k = draw(st.integers(1, max_k))
    profile = draw(st.lists(st.integers(1, k), min_size=g.n, max_size=g.n))
    return g, profile, k


def floyd_warshall(g: Graph) -> np.ndarray:
    n = g.n
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0)
    for u, v in g.edges:
        d[u - 1, v - 1] = d[v - 1, u - 1] = 1
    for m in range(n):
        d = np.minimum(d, d[:, m : m + 1] + d[m : m + 1, :])
    return d


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[cid]
        terminalreporter.write_line(f"criterion {cid:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def triangle():
    return load_graph([(1, 2), (2, 3), (1, 3)], 3)


@pytest.fixture
def path3():
    return load_graph([(1, 2), (2, 3)], 3)


@pytest.fixture
def cycle4():
    return load_graph([(1, 2), (2, 3), (3, 4), (4, 1)], 4)


@pytest.fixture
def star4():
    return load_graph([(1, 2), (1, 3), (1, 4)], 4)
