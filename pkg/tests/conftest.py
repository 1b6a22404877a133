from __future__ import annotations

import itertools
import math
from collections import deque

import numpy as np
import pytest

import netblaze.blocking as blocking
from netblaze.fixtures import base_seed, load_network_fixture
from netblaze.metrics import SourceSet, fixed_point_oracle
from netblaze.network import Network, build_network, discretize
from netblaze.slowness import SlownessField


# Every block report made anywhere in the session, as (burnt, preserved, total).
REPORTS: list[tuple[float, float, float]] = []
# Acceptance outcome lines, printed in the terminal summary.
ACCEPTANCE: dict[int, str] = {}

_lengths = blocking._lengths


def _recorded_lengths(net, burnt):
    b, p = _lengths(net, burnt)
    REPORTS.append((b, p, net.total_length))
    return b, p


blocking._lengths = _recorded_lengths


def pytest_collection_modifyitems(config, items):
    # acceptance last, so the conservation criterion sees every earlier report
    items.sort(key=lambda item: item.get_closest_marker("acceptance") is not None)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])


def make_network(coords, pairs, lengths=None) -> Network:
    return build_network(
        {
            "vertices": [{"id": i, "x": x, "y": y} for i, (x, y) in enumerate(coords)],
            "edges": [
                {"id": j, "tail": a, "head": b, **({} if lengths is None else {"length": lengths[j]})}
                for j, (a, b) in enumerate(pairs)
            ],
        }
    )


@pytest.fixture
def abc():
    """Path A-B-C with unit edges on the x axis."""
    return load_network_fixture("abc")


@pytest.fixture
def triangle():
    return load_network_fixture("triangle")


@pytest.fixture
def cycle4():
    return load_network_fixture("cycle4")


@pytest.fixture
def unit():
    return SlownessField.constant(1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(base_seed())


def brute_force_distance(net: Network, a: int, b: int) -> float:
    """Shortest simple path between two vertices by enumerating all of them."""
    best = math.inf
    stack = [(a, frozenset({a}), 0.0)]
    while stack:
        i, seen, d = stack.pop()
        if i == b:
            best = min(best, d)
            continue
        for j, _ in net.incidence[i]:
            k = net.other_end(j, i)
            if k not in seen:
                stack.append((k, seen | {k}, d + net.edges[j].length))
    return best


def all_pairs_grid_distance(grid, c) -> np.ndarray:
    """``D[y, x] = S(y, x)`` from one fixed-point solve per source node."""
    return np.array(
        [fixed_point_oracle(grid, c, SourceSet.from_nodes([y])).values for y in range(grid.n_nodes)]
    )


def hopf_lax_brute(D: np.ndarray, u0: np.ndarray, t: float) -> np.ndarray:
    """``min { u0(y) : S(y, x) <= t }`` by scanning all pairs."""
    n = len(u0)
    out = np.empty(n)
    for x in range(n):
        out[x] = min(u0[y] for y in range(n) if D[y, x] <= t)
    return out


def dyadic_network() -> Network:
    """Small network whose lengths and grid steps are exact binary fractions."""
    coords = [(0, 0), (1, 0), (1, 1), (0, 1), (2, 1), (2, 0)]
    pairs = [(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (4, 5), (5, 1), (0, 2)]
    lengths = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.5]
    return make_network(coords, pairs, lengths)


def subsets(items):
    items = sorted(items)
    return itertools.chain.from_iterable(itertools.combinations(items, r) for r in range(len(items) + 1))


def grid_separates(g, sources, sigma, preserved):
    """BFS on the grid graph with the ``sigma`` vertices removed."""
    adj = [[] for _ in range(g.n_nodes)]
    for a, b, _ in zip(*g.arcs()):
        adj[int(a)].append(int(b))
    seen = set(sources)
    queue = deque(sources)
    while queue:
        n = queue.popleft()
        for k in adj[n]:
            if k not in sigma and k not in seen:
                seen.add(k)
                queue.append(k)
    return all(int(n) not in seen for j in preserved for n in g.edge_nodes[j] if int(n) not in sigma)
