import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from netblaze.blocking import _lengths
from netblaze.fixtures import random_small_network
from netblaze.hopflax import Theta
from netblaze.metrics import SourceSet, fixed_point_oracle, solve_blocked_distance, solve_distance
from netblaze.network import build_network, discretize, network_to_dict
from netblaze.slowness import SlownessField

seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=30, deadline=None)
@given(seeds, st.floats(0.02, 0.5))
def test_label_setting_matches_oracle(seed, h):
    rng = np.random.default_rng(seed)
    net = random_small_network(rng, max_vertices=10, max_edges=16)
    g = discretize(net, h)
    c = SlownessField.sampled(rng.uniform(0.2, 5, g.n_nodes))
    src = SourceSet.from_nodes([int(rng.integers(g.n_nodes))])
    np.testing.assert_array_equal(solve_distance(g, c, src).values, fixed_point_oracle(g, c, src).values)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_blocked_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    net = random_small_network(rng, max_vertices=10, max_edges=16)
    g = discretize(net, 0.1)
    c = SlownessField.sampled(rng.uniform(0.2, 5, g.n_nodes))
    sigma = set(rng.choice(np.arange(1, net.n_vertices), rng.integers(0, net.n_vertices), replace=False).tolist())
    a = solve_blocked_distance(g, c, SourceSet.from_nodes([0]), sigma)
    b = fixed_point_oracle(g, c, SourceSet.from_nodes([0]), sigma)
    np.testing.assert_array_equal(a.values, b.values)
    assert a.blocked == b.blocked


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_network_round_trip(seed):
    net = random_small_network(np.random.default_rng(seed))
    assert build_network(network_to_dict(net)) == net


@settings(max_examples=200, deadline=None)
@given(seeds, st.data())
def test_length_split_is_exact(seed, data):
    net = random_small_network(np.random.default_rng(seed))
    burnt = data.draw(st.sets(st.integers(0, net.n_edges - 1)))
    b, p = _lengths(net, burnt)
    assert b + p == net.total_length


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=6, unique=True), st.lists(st.floats(0, 10), min_size=6, max_size=6))
def test_theta_is_nondecreasing(xs, steps):
    xs = sorted(xs)
    ys = np.cumsum(steps[: len(xs)])
    theta = Theta(tuple(xs), tuple(ys))
    v = np.linspace(xs[0] - 1, xs[-1] + 1, 50)
    assert np.all(np.diff(theta(v)) >= 0)
