"""Evolutive solutions through the Hopf-Lax formula.

For an initial datum ``u0`` on the grid,

    u(x, t) = min { u0(y) : S(y, x) <= t },

where ``S`` is the discrete distance of :mod:`netblaze.metrics`.  The
formula is evaluated level by level: for each distinct value ``a`` of
``u0`` one multi-source solve from ``{u0 <= a}`` gives the time at which
that sublevel set reaches every node, and ``u(x, t)`` is the smallest
level whose arrival time at ``x`` is at most ``t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonMonotoneTheta
from .metrics import SourceSet, solve_distance
from .network import Grid
from .slowness import SlownessField


@dataclass(frozen=True, eq=False)
class EvolvedSolution:
    grid: Grid
    levels: np.ndarray  # distinct values of u0, ascending
    arrival: np.ndarray  # arrival[k, x] = S({u0 <= levels[k]}, x)

    def __call__(self, t: float) -> np.ndarray:
        """Values at every node at time ``t`` (``t >= 0``)."""
        if t < 0:
            raise ValueError("time must be nonnegative")
        # first level reaching x by time t; the last level covers every node at t = 0
        k = np.argmax(self.arrival <= t, axis=0)
        return self.levels[k]

    def value(self, node: int, t: float) -> float:
        return float(self(t)[node])

    def breakpoints(self) -> np.ndarray:
        """Times at which some node value may jump."""
        a = self.arrival[np.isfinite(self.arrival)]
        return np.unique(np.concatenate([[0.0], a]))


def evolve(grid: Grid, c: SlownessField, u0) -> EvolvedSolution:
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (grid.n_nodes,):
        raise ValueError(f"initial datum has shape {u0.shape}, grid has {grid.n_nodes} nodes")
    if not np.all(np.isfinite(u0)):
        raise ValueError("initial datum must be finite")
    levels = np.unique(u0)
    arrival = np.empty((len(levels), grid.n_nodes))
    for k, a in enumerate(levels):
        src = SourceSet.from_nodes(np.flatnonzero(u0 <= a))
        arrival[k] = solve_distance(grid, c, src).values
    return EvolvedSolution(grid, levels, arrival)


@dataclass(frozen=True)
class FrontSnapshot:
    t: float
    burnt_nodes: frozenset[int]
    burnt_length: float


def burnt_length(grid: Grid, values_along_edge, t: float) -> float:
    """Measure of ``{value <= t}``, interpolating linearly inside each grid step.

    ``values_along_edge(j)`` returns the node values on edge ``j`` for
    ``m = 0..M_j``.  Edges burnt end to end contribute their exact length.
    """
    parts = []
    for j, e in enumerate(grid.network.edges):
        v = values_along_edge(j)
        if np.all(v <= t):
            parts.append(e.length)
            continue
        h = float(grid.steps[j])
        for v1, v2 in zip(v[:-1], v[1:]):
            lo, hi = min(v1, v2), max(v1, v2)
            if hi <= t:
                parts.append(h)
            elif lo <= t:
                # hi > t >= lo, hi may be inf
                parts.append(0.0 if math.isinf(hi) else h * (t - lo) / (hi - lo))
    return math.fsum(parts)


def front_at(grid: Grid, c: SlownessField, r0: SourceSet, t: float) -> FrontSnapshot:
    """Burnt region at time ``t`` for a fire started on ``r0``."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    u = solve_distance(grid, c, r0)
    return snapshot(u, t)


def snapshot(u, t: float) -> FrontSnapshot:
    """Threshold an already computed distance field at time ``t``."""
    nodes = frozenset(np.flatnonzero(u.values <= t).tolist())
    return FrontSnapshot(float(t), nodes, burnt_length(u.grid, u.along_edge, t))


@dataclass(frozen=True)
class Theta:
    """Nondecreasing piecewise-linear map given by sorted breakpoints,
    extended by constants outside them."""

    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def __post_init__(self):
        if len(self.xs) != len(self.ys) or not self.xs:
            raise NonMonotoneTheta("breakpoint table needs matching, nonempty xs and ys")
        if any(b <= a for a, b in zip(self.xs, self.xs[1:])):
            raise NonMonotoneTheta("breakpoint abscissae must be strictly increasing")
        if any(b < a for a, b in zip(self.ys, self.ys[1:])):
            raise NonMonotoneTheta("theta must be nondecreasing")

    def __call__(self, v):
        return np.interp(v, self.xs, self.ys)


def relabel_check(grid: Grid, c: SlownessField, u0, theta: Theta) -> bool:
    """Whether evolving ``theta(u0)`` equals ``theta`` of the evolution of ``u0``.

    Compared exactly at every node and at every breakpoint time of either
    evolution.
    """
    if not isinstance(theta, Theta):
        theta = Theta(*theta)
    u0 = np.asarray(u0, dtype=float)
    plain = evolve(grid, c, u0)
    relabeled = evolve(grid, c, theta(u0))
    times = np.union1d(plain.breakpoints(), relabeled.breakpoints())
    return all(np.array_equal(relabeled(t), theta(plain(t))) for t in times)
