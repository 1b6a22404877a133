"""Monotone finite-difference eikonal solvers on a network grid.

The discrete travel time solves

    u(y) = min over grid neighbours x of y  { u(x) + h_j * c(y) },   u = 0 on sources,

where ``j`` is the edge carrying the segment ``x -- y``.  At a vertex the
minimum runs over the neighbours on every incident edge.  The update is
monotone and causal (a node's value only depends on strictly smaller
values), so a label-setting sweep in Dijkstra order computes it exactly.
:func:`fixed_point_oracle` computes the same fixed point by plain value
iteration; it shares no code with the label-setting path apart from the
arc weights and is used to check it.

Blocked vertices are removed from the propagation.  Afterwards each one
gets a separate value per incident edge, read off its neighbour on that
edge, since the burning time at a closed junction depends on the side the
fire arrives from.
"""

from __future__ import annotations

import csv
import heapq
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import BlockedSource, EmptySourceSet, GridMismatch, NonConvergence
from .network import Grid, fmt
from .slowness import SlownessField

INF = math.inf


@dataclass(frozen=True)
class SourceSet:
    """Grid nodes where the solution is pinned to zero."""

    nodes: frozenset[int]

    @classmethod
    def from_locations(cls, grid: Grid, locations: Iterable) -> "SourceSet":
        """Snap network locations (vertex ids or ``(edge, s)``) to grid nodes."""
        return cls(frozenset(grid.snap(loc) for loc in locations))

    @classmethod
    def from_nodes(cls, nodes: Iterable[int]) -> "SourceSet":
        return cls(frozenset(int(n) for n in nodes))

    @classmethod
    def everywhere(cls, grid: Grid) -> "SourceSet":
        return cls(frozenset(range(grid.n_nodes)))

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self):
        return iter(sorted(self.nodes))


@dataclass(frozen=True, eq=False)
class NodeField:
    """Scalar values on grid nodes, ``inf`` where the front never arrives.

    ``blocked`` maps each blocked vertex to ``{edge id: value}``; the scalar
    entry of a blocked vertex in ``values`` is the minimum of those.
    """

    grid: Grid
    values: np.ndarray
    sources: frozenset[int] = frozenset()
    blocked: Mapping[int, Mapping[int, float]] = field(default_factory=dict)
    sweeps: int | None = None

    def __post_init__(self):
        self.values.setflags(write=False)

    def __len__(self) -> int:
        return len(self.values)

    def at(self, node: int, edge: int | None = None) -> float:
        if edge is not None and node in self.blocked:
            return self.blocked[node][edge]
        return float(self.values[node])

    def vertex_values(self) -> np.ndarray:
        return self.values[: self.grid.n_vertices]

    def along_edge(self, j: int) -> np.ndarray:
        """Values at ``m = 0..M_j`` on edge ``j``, per-edge values at blocked ends."""
        nodes = self.grid.edge_nodes[j]
        out = self.values[nodes].copy()
        for k in (0, len(nodes) - 1):
            if int(nodes[k]) in self.blocked:
                out[k] = self.blocked[int(nodes[k])][j]
        return out

    def finite_max(self) -> float:
        fin = self.values[np.isfinite(self.values)]
        return float(fin.max()) if len(fin) else 0.0

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["edge_id", "m", "s", "x", "y", "value", "incident_edge_id"])
        g = self.grid
        for j, nodes in enumerate(g.edge_nodes):
            vals = self.along_edge(j)
            for m, node in enumerate(nodes):
                x, y = g.coords[node]
                inc = j if int(node) in self.blocked else ""
                w.writerow([j, m, fmt(g.edge_s[j][m]), fmt(x), fmt(y), fmt(vals[m]), inc])
        return buf.getvalue()


def _check_sources(grid: Grid, src: SourceSet, sigma: frozenset[int]) -> None:
    if not len(src):
        raise EmptySourceSet("at least one source node is required")
    bad = [n for n in src.nodes if not 0 <= n < grid.n_nodes]
    if bad:
        raise GridMismatch(f"source nodes {sorted(bad)} are not on the grid")
    hit = sorted(src.nodes & sigma)
    if hit:
        raise BlockedSource(f"source vertices {hit} are blocked")


def _block_set(grid: Grid, sigma: Iterable[int] | None) -> frozenset[int]:
    sigma = frozenset(int(i) for i in (sigma or ()))
    bad = [i for i in sigma if not 0 <= i < grid.n_vertices]
    if bad:
        raise GridMismatch(f"blocked ids {sorted(bad)} are not vertices")
    return sigma


def _weighted_arcs(grid: Grid, c: SlownessField):
    src, dst, edge = grid.arcs()
    return src, dst, edge, c.arc_weights(grid, dst, edge)


def _label_setting(grid, arcs, sources, removed) -> np.ndarray:
    src, dst, _, w = arcs
    out: list[list[tuple[int, float]]] = [[] for _ in range(grid.n_nodes)]
    for a, b, wt in zip(src.tolist(), dst.tolist(), w.tolist()):
        if a not in removed and b not in removed:
            out[a].append((b, wt))

    u = [INF] * grid.n_nodes
    done = [False] * grid.n_nodes
    heap = [(0.0, n) for n in sorted(sources)]
    for n in sources:
        u[n] = 0.0
    # (value, node) keys: equal values pop in ascending node order
    while heap:
        d, p = heapq.heappop(heap)
        if done[p]:
            continue
        done[p] = True
        for v, wt in out[p]:
            nd = d + wt
            if nd < u[v]:
                u[v] = nd
                heapq.heappush(heap, (nd, v))
    return np.array(u, dtype=float)


def _attach_blocked(grid, c, u, sigma) -> tuple[np.ndarray, dict]:
    """Per-edge values at blocked vertices from the one-sided scheme."""
    blocked: dict[int, dict[int, float]] = {}
    u = u.copy()
    for i in sorted(sigma):
        per_edge = {}
        for j, _ in grid.network.incidence[i]:
            nbr = grid.neighbor_on_edge(i, j)
            if nbr in sigma:
                per_edge[j] = INF
            else:
                wt = c.arc_weights(grid, np.array([i]), np.array([j]))[0]
                per_edge[j] = float(u[nbr] + wt)
        blocked[i] = per_edge
        u[i] = min(per_edge.values(), default=INF)
    return u, blocked


def solve_distance(grid: Grid, c: SlownessField, src: SourceSet) -> NodeField:
    """Discrete distance ``S(R_0, .)`` from the source nodes, by label-setting."""
    _check_sources(grid, src, frozenset())
    u = _label_setting(grid, _weighted_arcs(grid, c), src.nodes, frozenset())
    return NodeField(grid, u, src.nodes)


def solve_operator_field(grid: Grid, x0: int, delta: float) -> NodeField:
    """Operator travel time ``delta * d(x0, .)`` (``delta`` is a slowness)."""
    if not delta >= 0:
        raise ValueError(f"delta must be nonnegative, got {delta!r}")
    if not 0 <= x0 < grid.n_vertices:
        raise GridMismatch(f"operation center {x0} is not a vertex")
    if delta == 0:
        return NodeField(grid, np.zeros(grid.n_nodes), frozenset({x0}))
    return solve_distance(grid, SlownessField.constant(delta), SourceSet(frozenset({x0})))


def solve_blocked_distance(
    grid: Grid, c: SlownessField, src: SourceSet, sigma: Iterable[int] | None
) -> NodeField:
    """Distance restricted to paths avoiding the vertices in ``sigma``."""
    sigma = _block_set(grid, sigma)
    _check_sources(grid, src, sigma)
    u = _label_setting(grid, _weighted_arcs(grid, c), src.nodes, sigma)
    u, blocked = _attach_blocked(grid, c, u, sigma)
    return NodeField(grid, u, src.nodes, blocked)


def fixed_point_oracle(
    grid: Grid, c: SlownessField, src: SourceSet, sigma: Iterable[int] | None = None
) -> NodeField:
    """Jacobi value iteration ``u <- min(u, u[nbr] + h c)`` to its fixed point.

    Independent check on the label-setting solvers; the result records the
    number of sweeps that changed at least one value.
    """
    sigma = _block_set(grid, sigma)
    _check_sources(grid, src, sigma)
    a, b, _, w = _weighted_arcs(grid, c)
    if sigma:
        keep = np.array([x not in sigma and y not in sigma for x, y in zip(a, b)], dtype=bool)
        a, b, w = a[keep], b[keep], w[keep]

    u = np.full(grid.n_nodes, INF)
    u[sorted(src.nodes)] = 0.0
    limit = grid.n_nodes**2
    sweeps = 0
    while True:
        new = u.copy()
        np.minimum.at(new, b, u[a] + w)
        if np.array_equal(new, u):
            break
        u = new
        sweeps += 1
        if sweeps > limit:
            raise NonConvergence(f"no fixed point after {limit} sweeps")
    u, blocked = _attach_blocked(grid, c, u, sigma)
    return NodeField(grid, u, src.nodes, blocked, sweeps=sweeps)
