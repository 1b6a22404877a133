"""Junction blocking: admissible vertices, the optimal strategy, reports.

An operator starting at vertex ``x0`` can close a junction only if it gets
there strictly before the fire.  Closing the admissible vertices that
border a non-admissible one cuts the admissible part of the network off
from the fire, which preserves at least as much as any other admissible
choice.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import GridMismatch, InadmissibleStrategy, TooManyAdmissibleVertices
from .metrics import NodeField, SourceSet, solve_blocked_distance, solve_distance, solve_operator_field
from .network import Grid, Network
from .slowness import SlownessField

MAX_ENUMERATED = 20


@dataclass(frozen=True)
class Scenario:
    r0: SourceSet
    x0: int
    delta: float

    def __post_init__(self):
        if not self.delta >= 0:
            raise ValueError(f"delta must be nonnegative, got {self.delta!r}")


@dataclass(frozen=True)
class CostWeights:
    alpha: Mapping[int, float] = field(default_factory=dict)  # per vertex, blocking cost
    beta: Mapping[int, float] = field(default_factory=dict)  # per edge, destruction damage

    def __post_init__(self):
        for name, table in (("alpha", self.alpha), ("beta", self.beta)):
            for k, v in table.items():
                if not (v >= 0 and math.isfinite(v)):
                    raise ValueError(f"{name}[{k}] must be finite and nonnegative, got {v!r}")


@dataclass(frozen=True, eq=False)
class BlockReport:
    sigma: tuple[int, ...]
    burnt_edges: tuple[int, ...]
    preserved_edges: tuple[int, ...]
    burnt_length: float
    preserved_length: float
    admissible_vertices: tuple[int, ...]
    override: bool
    field: NodeField

    def to_dict(self) -> dict:
        return {
            "sigma": list(self.sigma),
            "burnt_edges": list(self.burnt_edges),
            "preserved_edges": list(self.preserved_edges),
            "burnt_length": self.burnt_length,
            "preserved_length": self.preserved_length,
            "admissible_vertices": list(self.admissible_vertices),
            "override": self.override,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"


def admissible_vertices(u: NodeField, w: NodeField) -> frozenset[int]:
    """Vertices the operator reaches strictly before the fire: ``w < u``."""
    if u.grid is not w.grid:
        raise GridMismatch("fire and operator fields live on different grids")
    uv, wv = u.vertex_values(), w.vertex_values()
    return frozenset(np.flatnonzero(wv < uv).tolist())


def optimal_strategy(net: Network, v_ad: Iterable[int]) -> frozenset[int]:
    """Admissible vertices sharing an edge with a non-admissible vertex."""
    v_ad = frozenset(v_ad)
    sigma = set()
    for e in net.edges:
        if (e.tail in v_ad) != (e.head in v_ad):
            sigma.add(e.tail if e.tail in v_ad else e.head)
    return frozenset(sigma)


def scenario_fields(grid: Grid, c: SlownessField, scenario: Scenario):
    """Fire arrival ``u``, operator arrival ``w`` and the admissible set."""
    u = solve_distance(grid, c, scenario.r0)
    w = solve_operator_field(grid, scenario.x0, scenario.delta)
    return u, w, admissible_vertices(u, w)


def classify_edges(field: NodeField, sigma: Iterable[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split edges into (burnt, preserved).

    An edge burns iff the fire reaches one of its unblocked grid nodes.  For
    edges with interior nodes that is the same as an interior node being
    finite; a per-edge value at a blocked end never ignites the edge alone.
    """
    sigma = frozenset(sigma)
    g = field.grid
    burnt, preserved = [], []
    for j, nodes in enumerate(g.edge_nodes):
        live = [int(n) for n in nodes if int(n) not in sigma]
        (burnt if any(math.isfinite(field.values[n]) for n in live) else preserved).append(j)
    return tuple(burnt), tuple(preserved)


def _lengths(net: Network, burnt: Iterable[int]) -> tuple[float, float]:
    """(burnt, preserved) lengths whose floating-point sum is exactly the total.

    The larger part is ``total - smaller``, rounded, which is at least half
    the total; subtracting it back from the total is then exact, so the
    recovered smaller part and the larger part add up to the total with no
    rounding.  Each part is within an ulp of its exact value.
    """
    burnt = set(burnt)
    total = net.total_length
    b = math.fsum(e.length for e in net.edges if e.id in burnt)
    p = math.fsum(e.length for e in net.edges if e.id not in burnt)
    if b <= p:
        p = total - b
        b = total - p
    else:
        b = total - p
        p = total - b
    return b, p


def block_report(
    grid: Grid,
    c: SlownessField,
    scenario: Scenario,
    sigma: Iterable[int],
    allow_inadmissible: bool = False,
) -> BlockReport:
    """Burnt and preserved regions when the vertices in ``sigma`` are closed.

    With ``allow_inadmissible`` an arbitrary ``sigma`` is evaluated and the
    report is flagged (``override``) when it contains inadmissible vertices.
    """
    sigma = frozenset(int(i) for i in sigma)
    _, _, v_ad = scenario_fields(grid, c, scenario)
    outside = sorted(sigma - v_ad)
    if outside and not allow_inadmissible:
        raise InadmissibleStrategy(f"vertices {outside} cannot be reached before the fire")
    field = solve_blocked_distance(grid, c, scenario.r0, sigma)
    burnt, preserved = classify_edges(field, sigma)
    burnt_len, preserved_len = _lengths(grid.network, burnt)
    return BlockReport(
        sigma=tuple(sorted(sigma)),
        burnt_edges=burnt,
        preserved_edges=preserved,
        burnt_length=burnt_len,
        preserved_length=preserved_len,
        admissible_vertices=tuple(sorted(v_ad)),
        override=bool(outside),
        field=field,
    )


# -- exhaustive enumeration ------------------------------------------------------


class _Reach:
    """Burnt-edge sets by graph search, for enumerating many strategies.

    Fire reachability on the grid only depends on which vertices are closed,
    so a search over the vertex graph reproduces :func:`classify_edges`
    without solving.
    """

    def __init__(self, grid: Grid, r0: SourceSet):
        self.net = grid.network
        self.start_vertices = frozenset(n for n in r0.nodes if grid.is_vertex(n))
        self.start_edges = frozenset(int(grid.node_edge[n]) for n in r0.nodes if not grid.is_vertex(n))

    def burnt_edges(self, sigma: frozenset[int]) -> frozenset[int]:
        net = self.net
        burnt = set(self.start_edges)
        seen = set(self.start_vertices)
        queue = deque(sorted(self.start_vertices))
        for j in sorted(self.start_edges):
            for end in (net.edges[j].tail, net.edges[j].head):
                if end not in sigma and end not in seen:
                    seen.add(end)
                    queue.append(end)
        while queue:
            i = queue.popleft()
            for j, _ in net.incidence[i]:
                burnt.add(j)
                k = net.other_end(j, i)
                if k not in sigma and k not in seen:
                    seen.add(k)
                    queue.append(k)
        return frozenset(burnt)


def _subsets(items: Iterable[int]):
    items = sorted(items)
    for r in range(len(items) + 1):
        yield from (frozenset(s) for s in itertools.combinations(items, r))


def _guard(v_ad) -> None:
    if len(v_ad) > MAX_ENUMERATED:
        raise TooManyAdmissibleVertices(
            f"{len(v_ad)} admissible vertices; exhaustive search is limited to {MAX_ENUMERATED}"
        )


@dataclass(frozen=True)
class Verification:
    ok: bool
    sigma_opt: tuple[int, ...]
    admissible_vertices: tuple[int, ...]
    checked: int
    witness: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "sigma_opt": list(self.sigma_opt),
            "admissible_vertices": list(self.admissible_vertices),
            "checked": self.checked,
            "witness": None if self.witness is None else list(self.witness),
        }


def verify_optimality(grid: Grid, c: SlownessField, scenario: Scenario) -> Verification:
    """Check that no admissible strategy preserves an edge ``sigma_opt`` loses."""
    _, _, v_ad = scenario_fields(grid, c, scenario)
    _guard(v_ad)
    sigma_opt = optimal_strategy(grid.network, v_ad)
    reach = _Reach(grid, scenario.r0)
    all_edges = frozenset(range(grid.network.n_edges))
    kept_opt = all_edges - reach.burnt_edges(sigma_opt)
    checked = 0
    for sigma in _subsets(v_ad):
        checked += 1
        if not (all_edges - reach.burnt_edges(sigma)) <= kept_opt:
            return Verification(False, tuple(sorted(sigma_opt)), tuple(sorted(v_ad)), checked, tuple(sorted(sigma)))
    return Verification(True, tuple(sorted(sigma_opt)), tuple(sorted(v_ad)), checked)


def strategy_cost(weights: CostWeights, sigma: Iterable[int], burnt: Iterable[int]) -> float:
    return math.fsum(
        [weights.alpha.get(i, 0.0) for i in sorted(sigma)]
        + [weights.beta.get(j, 0.0) for j in sorted(burnt)]
    )


def cost_optimal_strategy(
    grid: Grid, c: SlownessField, scenario: Scenario, weights: CostWeights
) -> tuple[frozenset[int], float]:
    """Exhaustive minimizer of blocking cost plus damage over admissible strategies.

    Ties go to the smaller strategy, then to the lexicographically smaller
    sorted id list.
    """
    _, _, v_ad = scenario_fields(grid, c, scenario)
    _guard(v_ad)
    reach = _Reach(grid, scenario.r0)
    best_key, best = None, None
    for sigma in _subsets(v_ad):
        cost = strategy_cost(weights, sigma, reach.burnt_edges(sigma))
        key = (cost, len(sigma), tuple(sorted(sigma)))
        if best_key is None or key < best_key:
            best_key, best = key, sigma
    return best, best_key[0]
