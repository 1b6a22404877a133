"""Slowness coefficient ``c(x)`` of the eikonal Hamiltonian ``|p| / c(x)``.

Travel cost is slowness times length, so a grid step of size ``h_j`` into
node ``y`` along edge ``j`` costs ``h_j * c(y)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import GridMismatch, NonPositiveSlowness
from .network import Grid

KINDS = ("constant", "norm", "per_edge", "sampled")


@dataclass(frozen=True)
class SlownessField:
    kind: str
    c0: float = 1.0
    table: Mapping[int, float] = field(default_factory=dict)
    samples: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown slowness kind {self.kind!r}")
        if self.kind == "constant":
            _check_positive(self.c0, "c")
        for j, cj in self.table.items():
            _check_positive(cj, f"table[{j}]")
        for k, ck in enumerate(self.samples):
            _check_positive(ck, f"samples[{k}]")

    @classmethod
    def constant(cls, c0: float) -> "SlownessField":
        return cls("constant", c0=float(c0))

    @classmethod
    def norm(cls) -> "SlownessField":
        """``c(x) = |x|``, the Euclidean norm of the embedded coordinates."""
        return cls("norm")

    @classmethod
    def per_edge(cls, table: Mapping[int, float]) -> "SlownessField":
        return cls("per_edge", table={int(j): float(v) for j, v in table.items()})

    @classmethod
    def sampled(cls, values) -> "SlownessField":
        return cls("sampled", samples=tuple(float(v) for v in values))

    @classmethod
    def from_function(cls, grid: Grid, fn: Callable[[float, float], float]) -> "SlownessField":
        """Sample ``fn(x, y)`` at every grid node."""
        return cls.sampled(fn(float(x), float(y)) for x, y in grid.coords)

    def node_values(self, grid: Grid) -> np.ndarray:
        """One value per grid node (per-edge tables give vertices the minimum
        over incident edges; arc weights use the edge's own value)."""
        n = grid.n_nodes
        if self.kind == "constant":
            out = np.full(n, self.c0)
        elif self.kind == "norm":
            out = np.hypot(grid.coords[:, 0], grid.coords[:, 1])
        elif self.kind == "sampled":
            if len(self.samples) != n:
                raise GridMismatch(f"{len(self.samples)} slowness samples for {n} grid nodes")
            out = np.array(self.samples)
        else:
            per_edge = self._edge_table(grid)
            out = np.empty(n)
            for i in range(grid.n_vertices):
                inc = grid.network.incidence[i]
                out[i] = min(per_edge[j] for j, _ in inc) if inc else 1.0
            out[grid.n_vertices :] = per_edge[grid.node_edge[grid.n_vertices :]]
        bad = np.flatnonzero(~(out > 0) | ~np.isfinite(out))
        if len(bad):
            k = int(bad[0])
            raise NonPositiveSlowness(
                f"slowness {out[k]!r} at grid node {k} {tuple(grid.coords[k])}", "slowness"
            )
        return out

    def _edge_table(self, grid: Grid) -> np.ndarray:
        missing = [j for j in range(grid.network.n_edges) if j not in self.table]
        if missing:
            raise GridMismatch(f"per-edge slowness missing for edges {missing}")
        return np.array([self.table[j] for j in range(grid.network.n_edges)], dtype=float)

    def arc_weights(self, grid: Grid, dst: np.ndarray, edge: np.ndarray) -> np.ndarray:
        """Cost ``h_j * c(dst)`` of every directed arc into ``dst`` along ``edge``."""
        if self.kind == "per_edge":
            c = self._edge_table(grid)[edge]
        else:
            c = self.node_values(grid)[dst]
        return grid.steps[edge] * c

    def bounds(self, grid: Grid) -> tuple[float, float]:
        """``(c_min, c_max)`` over the grid."""
        if self.kind == "per_edge":
            vals = self._edge_table(grid)
        else:
            vals = self.node_values(grid)
        return float(vals.min()), float(vals.max())

    def to_dict(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "c": self.c0}
        if self.kind == "norm":
            return {"kind": "norm"}
        if self.kind == "per_edge":
            return {"kind": "per_edge", "table": {str(j): v for j, v in sorted(self.table.items())}}
        return {"kind": "sampled", "values": list(self.samples)}


def _check_positive(v: float, what: str) -> None:
    if not (v > 0 and math.isfinite(v)):
        raise NonPositiveSlowness(f"slowness must be positive and finite, got {v!r}", what)
