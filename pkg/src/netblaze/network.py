"""Embedded metric graphs and their per-edge uniform grids.

A :class:`Network` is a finite set of vertices in the plane joined by
straight edges.  Each edge ``j`` is parametrized by arclength on
``[0, l_j]``, running from its ``tail`` vertex to its ``head`` vertex; the
orientation only fixes the parametrization, the network itself is
undirected.

A :class:`Grid` subdivides every edge into ``M_j = ceil(l_j / h_target)``
equal steps.  Vertex nodes are shared by all incident edges and occupy the
node indices ``0 .. n_vertices - 1`` (node ``i`` *is* vertex ``i``); the
interior nodes of each edge follow, edge by edge.
"""

from __future__ import annotations

import csv
import heapq
import io
import json
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping, Sequence, Union

import jsonschema
import numpy as np

from .errors import (
    DanglingEdgeEndpoint,
    DisconnectedGraph,
    InvalidLocation,
    NonPositiveLength,
    SchemaError,
    SelfLoop,
)

# A point on the network: a vertex id, or (edge id, arclength from the tail).
Location = Union[int, "tuple[int, float]"]


@dataclass(frozen=True)
class Vertex:
    id: int
    x: float
    y: float

    @property
    def coords(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Edge:
    id: int
    tail: int
    head: int
    length: float


@dataclass(frozen=True)
class Network:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    # incidence[i] = ((edge id, sign), ...) with sign +1 at the tail, -1 at the head
    incidence: tuple[tuple[tuple[int, int], ...], ...] = field(compare=False, repr=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def total_length(self) -> float:
        return math.fsum(e.length for e in self.edges)

    def incidence_matrix(self) -> np.ndarray:
        """Dense signed incidence matrix ``a[i, j]``."""
        a = np.zeros((self.n_vertices, self.n_edges), dtype=int)
        for e in self.edges:
            a[e.tail, e.id] = 1
            a[e.head, e.id] = -1
        return a

    def degree(self, i: int) -> int:
        return len(self.incidence[i])

    def other_end(self, j: int, i: int) -> int:
        e = self.edges[j]
        return e.head if e.tail == i else e.tail

    def point(self, j: int, s: float) -> tuple[float, float]:
        """Embedded coordinates of arclength ``s`` along edge ``j``."""
        e = self.edges[j]
        a, b = self.vertices[e.tail], self.vertices[e.head]
        if s == e.length:
            return (b.x, b.y)
        r = s / e.length
        return (a.x + r * (b.x - a.x), a.y + r * (b.y - a.y))


_NETWORK_SCHEMA = {
    "type": "object",
    "required": ["vertices", "edges"],
    "properties": {
        "vertices": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "x", "y"],
                "properties": {
                    "id": {"type": "integer", "minimum": 0},
                    "x": {"type": "number"},
                    "y": {"type": "number"},
                },
            },
        },
        "edges": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "tail", "head"],
                "properties": {
                    "id": {"type": "integer", "minimum": 0},
                    "tail": {"type": "integer"},
                    "head": {"type": "integer"},
                    "length": {"type": "number"},
                },
            },
        },
    },
}


def json_path(parts: Sequence) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def validate_schema(doc, schema) -> None:
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as err:
        raise SchemaError(err.message, json_path(err.absolute_path)) from None


def _dense_ids(items: Sequence[Mapping], kind: str) -> list[Mapping]:
    by_id: dict[int, Mapping] = {}
    for k, item in enumerate(items):
        i = item["id"]
        if i in by_id:
            raise SchemaError(f"duplicate {kind} id {i}", f"$.{kind}s[{k}].id")
        by_id[i] = item
    if sorted(by_id) != list(range(len(by_id))):
        raise SchemaError(f"{kind} ids must be 0..{len(by_id) - 1}", f"$.{kind}s")
    return [by_id[i] for i in range(len(by_id))]


def build_network(spec: Mapping) -> Network:
    """Validate a vertex/edge description and build a :class:`Network`.

    ``spec`` has the layout of the network JSON document.  Missing edge
    lengths default to the Euclidean distance between the endpoints.
    """
    validate_schema(spec, _NETWORK_SCHEMA)
    vdocs = _dense_ids(spec["vertices"], "vertex")
    edocs = _dense_ids(spec["edges"], "edge")

    vertices = []
    for v in vdocs:
        x, y = float(v["x"]), float(v["y"])
        if not (math.isfinite(x) and math.isfinite(y)):
            raise SchemaError("vertex coordinates must be finite", f"$.vertices[id={v['id']}]")
        vertices.append(Vertex(v["id"], x, y))

    n = len(vertices)
    edges = []
    for e in edocs:
        j, a, b = e["id"], e["tail"], e["head"]
        for end in (a, b):
            if not 0 <= end < n:
                raise DanglingEdgeEndpoint(f"edge {j} references missing vertex {end}")
        if a == b:
            raise SelfLoop(f"edge {j} starts and ends at vertex {a}")
        if e.get("length") is None:
            length = math.dist(vertices[a].coords, vertices[b].coords)
        else:
            length = float(e["length"])
        if not (length > 0 and math.isfinite(length)):
            raise NonPositiveLength(f"edge {j} has length {length!r}")
        edges.append(Edge(j, a, b, length))

    incidence: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for e in edges:
        incidence[e.tail].append((e.id, 1))
        incidence[e.head].append((e.id, -1))

    if n:
        seen = {0}
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for j, _ in incidence[i]:
                k = edges[j].head if edges[j].tail == i else edges[j].tail
                if k not in seen:
                    seen.add(k)
                    queue.append(k)
        if len(seen) != n:
            missing = sorted(set(range(n)) - seen)
            raise DisconnectedGraph(f"vertices {missing} are not connected to vertex 0")

    return Network(tuple(vertices), tuple(edges), tuple(tuple(inc) for inc in incidence))


def network_to_dict(net: Network) -> dict:
    return {
        "vertices": [{"id": v.id, "x": v.x, "y": v.y} for v in net.vertices],
        "edges": [
            {"id": e.id, "tail": e.tail, "head": e.head, "length": e.length} for e in net.edges
        ],
    }


def load_network(path: str | Path) -> Network:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as err:
        raise SchemaError(f"invalid JSON: {err}", str(path)) from None
    return build_network(doc)


def write_network(net: Network, path: str | Path) -> None:
    Path(path).write_text(json.dumps(network_to_dict(net), indent=1) + "\n")


# -- locations and path distance ---------------------------------------------


def canonical_location(net: Network, loc) -> tuple:
    """Normalize ``loc`` to ``("v", i)`` or ``("e", j, s)`` with ``0 < s < l_j``.

    Edge locations at either end collapse onto the endpoint vertex so that
    shared endpoints compare equal.
    """
    if isinstance(loc, (int, np.integer)) and not isinstance(loc, bool):
        i = int(loc)
        if not 0 <= i < net.n_vertices:
            raise InvalidLocation(f"no vertex {i}")
        return ("v", i)
    try:
        j, s = loc
        j, s = int(j), float(s)
    except (TypeError, ValueError):
        raise InvalidLocation(f"cannot interpret location {loc!r}") from None
    if not 0 <= j < net.n_edges:
        raise InvalidLocation(f"no edge {j}")
    e = net.edges[j]
    if not 0.0 <= s <= e.length:
        raise InvalidLocation(f"arclength {s} outside [0, {e.length}] on edge {j}")
    if s == 0.0:
        return ("v", e.tail)
    if s == e.length:
        return ("v", e.head)
    return ("e", j, s)


def _vertex_dijkstra(net: Network, starts: Mapping[int, float]) -> list[float]:
    dist = [math.inf] * net.n_vertices
    heap = []
    for i, d0 in starts.items():
        if d0 < dist[i]:
            dist[i] = d0
            heap.append((d0, i))
    heapq.heapify(heap)
    while heap:
        d, i = heapq.heappop(heap)
        if d > dist[i]:
            continue
        for j, _ in net.incidence[i]:
            k = net.other_end(j, i)
            nd = d + net.edges[j].length
            if nd < dist[k]:
                dist[k] = nd
                heapq.heappush(heap, (nd, k))
    return dist


def _anchors(net: Network, loc: tuple) -> dict[int, float]:
    if loc[0] == "v":
        return {loc[1]: 0.0}
    _, j, s = loc
    e = net.edges[j]
    return {e.tail: s, e.head: e.length - s}


def path_distance(net: Network, a, b) -> float:
    """Infimum of the lengths of paths on the network joining ``a`` and ``b``."""
    la, lb = canonical_location(net, a), canonical_location(net, b)
    if la == lb:
        return 0.0
    best = math.inf
    if la[0] == "e" and lb[0] == "e" and la[1] == lb[1]:
        best = abs(la[2] - lb[2])
    dist = _vertex_dijkstra(net, _anchors(net, la))
    for i, tail_off in _anchors(net, lb).items():
        best = min(best, dist[i] + tail_off)
    return best


# -- grid -----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Grid:
    network: Network
    h_target: float
    steps: np.ndarray  # h_j
    counts: np.ndarray  # M_j
    edge_nodes: tuple[np.ndarray, ...]  # node ids for m = 0..M_j
    edge_s: tuple[np.ndarray, ...]  # arclength of those nodes
    coords: np.ndarray  # (n_nodes, 2)
    node_edge: np.ndarray  # -1 at vertex nodes
    node_m: np.ndarray  # -1 at vertex nodes
    neighbors: tuple[tuple[tuple[int, int], ...], ...]  # node -> ((neighbor, edge id), ...)

    @property
    def n_nodes(self) -> int:
        return len(self.coords)

    @property
    def n_vertices(self) -> int:
        return self.network.n_vertices

    @property
    def h_max(self) -> float:
        return float(self.steps.max()) if len(self.steps) else 0.0

    def is_vertex(self, node: int) -> bool:
        return node < self.network.n_vertices

    def segments(self) -> Iterator[tuple[int, int, int, float]]:
        """Yield ``(edge id, node a, node b, h_j)`` for every grid segment."""
        for j, nodes in enumerate(self.edge_nodes):
            h = float(self.steps[j])
            for m in range(len(nodes) - 1):
                yield j, int(nodes[m]), int(nodes[m + 1]), h

    def arcs(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Directed arcs ``(src, dst, edge)``, both directions of every segment."""
        src, dst, edge = [], [], []
        for j, a, b, _ in self.segments():
            src += [a, b]
            dst += [b, a]
            edge += [j, j]
        return np.array(src, dtype=int), np.array(dst, dtype=int), np.array(edge, dtype=int)

    def neighbor_on_edge(self, vertex: int, j: int) -> int:
        """The grid node adjacent to ``vertex`` along edge ``j``."""
        nodes = self.edge_nodes[j]
        return int(nodes[1]) if nodes[0] == vertex else int(nodes[-2])

    def snap(self, loc) -> int:
        """Nearest grid node to a network location (ties toward smaller m)."""
        c = canonical_location(self.network, loc)
        if c[0] == "v":
            return c[1]
        _, j, s = c
        h, M = float(self.steps[j]), int(self.counts[j])
        m = math.floor(s / h)
        if s - m * h > (m + 1) * h - s:
            m += 1
        return int(self.edge_nodes[j][min(max(m, 0), M)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["edge_id", "m", "s", "x", "y"])
        for j, nodes in enumerate(self.edge_nodes):
            for m, node in enumerate(nodes):
                x, y = self.coords[node]
                w.writerow([j, m, fmt(self.edge_s[j][m]), fmt(x), fmt(y)])
        return buf.getvalue()


def fmt(x: float) -> str:
    """17 significant digits, ``inf`` for +infinity."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def discretize(net: Network, h_target: float) -> Grid:
    """Uniform grid with step ``h_j = l_j / ceil(l_j / h_target)`` on each edge."""
    if not h_target > 0:
        raise ValueError(f"h_target must be positive, got {h_target!r}")
    nv = net.n_vertices
    coords = [v.coords for v in net.vertices]
    node_edge = [-1] * nv
    node_m = [-1] * nv
    steps, counts, edge_nodes, edge_s = [], [], [], []
    for e in net.edges:
        M = max(1, math.ceil(e.length / h_target))
        h = e.length / M
        nodes = [e.tail]
        s = [0.0]
        for m in range(1, M):
            node_edge.append(e.id)
            node_m.append(m)
            nodes.append(len(coords))
            s.append(m * h)
            coords.append(net.point(e.id, m * h))
        nodes.append(e.head)
        s.append(e.length)
        steps.append(h)
        counts.append(M)
        edge_nodes.append(np.array(nodes, dtype=int))
        edge_s.append(np.array(s))

    neighbors: list[list[tuple[int, int]]] = [[] for _ in coords]
    for j, nodes in enumerate(edge_nodes):
        for a, b in zip(nodes[:-1], nodes[1:]):
            neighbors[a].append((int(b), j))
            neighbors[b].append((int(a), j))

    return Grid(
        network=net,
        h_target=float(h_target),
        steps=np.array(steps, dtype=float),
        counts=np.array(counts, dtype=int),
        edge_nodes=tuple(edge_nodes),
        edge_s=tuple(edge_s),
        coords=np.array(coords, dtype=float).reshape(-1, 2),
        node_edge=np.array(node_edge, dtype=int),
        node_m=np.array(node_m, dtype=int),
        neighbors=tuple(tuple(nb) for nb in neighbors),
    )
