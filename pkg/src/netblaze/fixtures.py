"""Bundled fixture networks and seeded random network generators.

The three worked examples ship as JSON files under ``data/``; their
geometry is reconstructed (see the ``provenance`` field of each file).
"""

from __future__ import annotations

import json
import math
import os
from importlib import resources
from pathlib import Path

import numpy as np

from .config import ScenarioDoc, scenario_from_dict
from .network import Network, build_network

SEED_ENV = "NETBLAZE_SEED"

# scenario name -> network name
SCENARIOS = {
    "abc": "abc",
    "cycle4": "cycle4",
    "example1": "example1",
    "example2": "example2",
    "example3": "example2",
}


def data_path(name: str) -> Path:
    return Path(str(resources.files("netblaze") / "data" / name))


def load_network_fixture(name: str) -> Network:
    return build_network(json.loads(data_path(f"{name}_network.json").read_text()))


def load_fixture(name: str) -> tuple[Network, ScenarioDoc]:
    """Network and scenario of a bundled fixture (``example1`` ... ``example3``, ``abc``, ``cycle4``)."""
    net = load_network_fixture(SCENARIOS[name])
    doc = json.loads(data_path(f"{name}_scenario.json").read_text())
    return net, scenario_from_dict(doc, net)


def fixture_files(name: str) -> tuple[Path, Path]:
    """``(network path, scenario path)`` for the CLI."""
    return data_path(f"{SCENARIOS[name]}_network.json"), data_path(f"{name}_scenario.json")


def base_seed(default: int = 20240611) -> int:
    return int(os.environ.get(SEED_ENV, default))


def random_network(
    rng: np.random.Generator,
    n_vertices: int,
    n_edges: int,
    min_separation: float = 0.04,
    parallel: bool = True,
) -> Network:
    """Connected random planar-embedded network in the unit square.

    A random spanning tree plus extra random edges; a few extra edges may
    duplicate an existing vertex pair when ``parallel`` is set (parallel
    edges then get a stretched length so they are distinct arcs).
    """
    n_edges = max(n_edges, n_vertices - 1)
    pts: list[tuple[float, float]] = []
    while len(pts) < n_vertices:
        p = tuple(float(v) for v in rng.uniform(0.0, 1.0, size=2))
        if all(math.dist(p, q) >= min_separation for q in pts):
            pts.append(p)

    pairs: list[tuple[int, int, float | None]] = []
    for k in range(1, n_vertices):
        pairs.append((int(rng.integers(k)), k, None))
    used = {frozenset(p[:2]) for p in pairs}
    tries = 0
    while len(pairs) < n_edges and tries < 100 * n_edges:
        tries += 1
        a, b = (int(v) for v in rng.choice(n_vertices, size=2, replace=False))
        key = frozenset((a, b))
        if key in used:
            if parallel and rng.random() < 0.1:
                stretch = float(rng.uniform(1.1, 1.6))
                pairs.append((a, b, math.dist(pts[a], pts[b]) * stretch))
            continue
        used.add(key)
        pairs.append((a, b, None))

    spec = {
        "vertices": [{"id": i, "x": x, "y": y} for i, (x, y) in enumerate(pts)],
        "edges": [
            {"id": j, "tail": a, "head": b, **({} if ell is None else {"length": ell})}
            for j, (a, b, ell) in enumerate(pairs)
        ],
    }
    return build_network(spec)


def random_small_network(rng: np.random.Generator, max_vertices: int = 30, max_edges: int = 60) -> Network:
    nv = int(rng.integers(4, max_vertices + 1))
    ne = int(rng.integers(nv - 1, min(max_edges, nv * (nv - 1) // 2) + 1))
    return random_network(rng, nv, ne)
