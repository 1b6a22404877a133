import math

import numpy as np
import pytest

from netblaze.errors import NonMonotoneTheta
from netblaze.fixtures import random_small_network
from netblaze.hopflax import Theta, burnt_length, evolve, front_at, relabel_check
from netblaze.metrics import SourceSet, solve_distance
from netblaze.network import discretize
from netblaze.slowness import SlownessField

from .conftest import all_pairs_grid_distance, hopf_lax_brute


@pytest.fixture
def abc_grid(abc):
    return discretize(abc, 0.5)


def abc_u0(g):
    u0 = np.ones(g.n_nodes)
    u0[0] = 0.0
    return u0


def small_grid(rng):
    net = random_small_network(rng, max_vertices=8, max_edges=12)
    return discretize(net, 0.2)


def lipschitz_constant(g, u0):
    """Largest slope of ``u0`` across a grid segment; the constant w.r.t. grid distance."""
    src, dst, edge = g.arcs()
    return float(np.max(np.abs(u0[dst] - u0[src]) / g.steps[edge]))


# -- evolve ------------------------------------------------------------------------------


def test_time_zero_is_initial_datum(abc_grid, unit):
    u0 = abc_u0(abc_grid)
    np.testing.assert_array_equal(evolve(abc_grid, unit, u0)(0.0), u0)


def test_constant_datum_stays_constant(abc_grid, unit):
    sol = evolve(abc_grid, unit, np.full(abc_grid.n_nodes, 2.5))
    for t in (0.0, 0.3, 1.0, 10.0):
        assert np.all(sol(t) == 2.5)


def test_abc_value_at_c(abc_grid, unit):
    # frozen from the all-pairs oracle
    D = all_pairs_grid_distance(abc_grid, unit)
    u0 = abc_u0(abc_grid)
    assert hopf_lax_brute(D, u0, 1.5)[2] == 1.0
    assert hopf_lax_brute(D, u0, 2.0)[2] == 0.0
    sol = evolve(abc_grid, unit, u0)
    assert sol.value(2, 1.5) == 1.0
    assert sol.value(2, 2.0) == 0.0


def test_negative_time_rejected(abc_grid, unit):
    with pytest.raises(ValueError):
        evolve(abc_grid, unit, abc_u0(abc_grid))(-1.0)


def test_evolve_matches_brute_force(rng):
    for _ in range(3):
        g = small_grid(rng)
        c = SlownessField.sampled(rng.uniform(0.2, 5, g.n_nodes))
        D = all_pairs_grid_distance(g, c)
        u0 = rng.integers(-3, 4, g.n_nodes).astype(float)
        sol = evolve(g, c, u0)
        times = np.concatenate([sol.breakpoints()[:8], rng.uniform(0, D[np.isfinite(D)].max(), 5)])
        for t in times:
            np.testing.assert_array_equal(sol(t), hopf_lax_brute(D, u0, t))


def test_nonincreasing_in_time_and_eventually_constant(rng):
    g = small_grid(rng)
    c = SlownessField.sampled(rng.uniform(0.2, 5, g.n_nodes))
    sol = evolve(g, c, rng.normal(size=g.n_nodes))
    times = sol.breakpoints()
    for t0, t1 in zip(times, times[1:]):
        assert np.all(sol(t1) <= sol(t0))
    np.testing.assert_array_equal(sol(times[-1] * 2), np.full(g.n_nodes, sol.levels[0]))


def test_comparison_principle(rng):
    g = small_grid(rng)
    c = SlownessField.sampled(rng.uniform(0.2, 5, g.n_nodes))
    u0 = rng.normal(size=g.n_nodes)
    v0 = u0 + rng.uniform(0, 1, g.n_nodes)
    a, b = evolve(g, c, u0), evolve(g, c, v0)
    for t in np.union1d(a.breakpoints(), b.breakpoints()):
        assert np.all(a(t) <= b(t))


def test_level_set_identity(rng):
    g = small_grid(rng)
    c = SlownessField.sampled(rng.uniform(0.2, 5, g.n_nodes))
    u0 = rng.normal(size=g.n_nodes)
    u0[0] = -1.0
    sol = evolve(g, c, u0)
    r0 = SourceSet.from_nodes(np.flatnonzero(u0 <= 0))
    u = solve_distance(g, c, r0)
    for t in np.concatenate([[0.0], rng.uniform(0, u.finite_max(), 10)]):
        assert frozenset(np.flatnonzero(sol(t) <= 0).tolist()) == front_at(g, c, r0, t).burnt_nodes


def test_time_lipschitz_general_bound(rng):
    # with c above 1 the grid quantization term needs c_max; see the acceptance test for c <= 1
    g = small_grid(rng)
    c = SlownessField.sampled(rng.uniform(0.2, 5, g.n_nodes))
    lo, hi = c.bounds(g)
    u0 = rng.normal(size=g.n_nodes)
    L = lipschitz_constant(g, u0)
    sol = evolve(g, c, u0)
    tmax = sol.breakpoints()[-1]
    tau = tmax / 20
    for k in range(20):
        t = k * tau
        gap = np.abs(sol(t + tau) - sol(t))
        assert np.all(gap <= L * (tau + g.h_max * hi) / lo)


# -- fronts ------------------------------------------------------------------------------


def test_front_at_zero_is_sources(cycle4, unit):
    g = discretize(cycle4, 0.25)
    snap = front_at(g, unit, SourceSet.from_nodes([0, 2]), 0.0)
    assert snap.burnt_nodes == {0, 2}
    assert snap.burnt_length == 0.0


def test_front_saturates(cycle4, unit):
    g = discretize(cycle4, 0.25)
    snap = front_at(g, unit, SourceSet.from_nodes([0]), 2.0)
    assert snap.burnt_nodes == frozenset(range(g.n_nodes))
    assert snap.burnt_length == cycle4.total_length


def test_abc_burnt_length_at_one(abc_grid, unit):
    assert front_at(abc_grid, unit, SourceSet.from_nodes([0]), 1.0).burnt_length == 1.0


def test_burnt_length_interpolates(abc_grid, unit):
    assert front_at(abc_grid, unit, SourceSet.from_nodes([0]), 0.25).burnt_length == 0.25


def test_burnt_length_ignores_unreached(abc_grid):
    values = {0: np.array([0.0, 1.0, math.inf]), 1: np.full(3, math.inf)}
    # one full segment; the segment towards an unreached node adds nothing
    assert burnt_length(abc_grid, values.__getitem__, 5.0) == 0.5


def test_front_monotone_in_time(rng):
    g = small_grid(rng)
    c = SlownessField.sampled(rng.uniform(0.2, 5, g.n_nodes))
    r0 = SourceSet.from_nodes([0])
    prev_nodes, prev_len = frozenset(), 0.0
    for t in np.linspace(0, 5, 30):
        snap = front_at(g, c, r0, t)
        assert prev_nodes <= snap.burnt_nodes and prev_len <= snap.burnt_length
        prev_nodes, prev_len = snap.burnt_nodes, snap.burnt_length


# -- relabeling ----------------------------------------------------------------------------


@pytest.mark.parametrize(
    "theta",
    [Theta((0.0, 1.0), (0.0, 1.0)), Theta((0.0, 1.0), (3.0, 5.0)), Theta((0.0,), (7.0,))],
    ids=["identity", "affine", "constant"],
)
def test_relabel_examples(abc_grid, unit, theta):
    assert relabel_check(abc_grid, unit, abc_u0(abc_grid), theta)


def test_relabel_random(rng):
    g = small_grid(rng)
    c = SlownessField.sampled(rng.uniform(0.2, 5, g.n_nodes))
    u0 = rng.normal(size=g.n_nodes)
    for _ in range(5):
        xs = np.sort(rng.uniform(-3, 3, 4))
        ys = np.cumsum(rng.uniform(0, 2, 4) * (rng.random(4) < 0.7))
        assert relabel_check(g, c, u0, Theta(tuple(xs), tuple(ys)))


def test_theta_rejects_decreasing():
    with pytest.raises(NonMonotoneTheta):
        Theta((0.0, 1.0), (1.0, 0.0))
    with pytest.raises(NonMonotoneTheta):
        Theta((1.0, 1.0), (0.0, 1.0))
