"""Scenario, weight and run-configuration documents."""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .blocking import CostWeights, Scenario
from .errors import NonPositiveSlowness, SchemaError
from .metrics import SourceSet, solve_distance
from .network import Grid, Network, validate_schema
from .slowness import SlownessField

COMMANDS = ("distance", "evolve", "front", "block", "verify", "cost")

_LOCATION = {
    "oneOf": [
        {"type": "integer", "minimum": 0},
        {
            "type": "object",
            "required": ["edge", "s"],
            "properties": {"edge": {"type": "integer", "minimum": 0}, "s": {"type": "number"}},
        },
    ]
}

_SLOWNESS = {
    "type": "object",
    "required": ["kind"],
    "properties": {"kind": {"enum": ["constant", "norm", "per_edge"]}},
    "allOf": [
        {
            "if": {"properties": {"kind": {"const": "constant"}}},
            "then": {"required": ["c"], "properties": {"c": {"type": "number"}}},
        },
        {
            "if": {"properties": {"kind": {"const": "per_edge"}}},
            "then": {
                "required": ["table"],
                "properties": {
                    "table": {
                        "type": "object",
                        "patternProperties": {"^[0-9]+$": {"type": "number"}},
                        "additionalProperties": False,
                    }
                },
            },
        },
    ],
}

_SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["R0", "x0", "delta", "slowness"],
    "properties": {
        "R0": {"oneOf": [{"const": "all"}, {"type": "array", "minItems": 1, "items": _LOCATION}]},
        "x0": {
            "oneOf": [
                {"type": "integer", "minimum": 0},
                {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            ]
        },
        "delta": {"type": "number", "minimum": 0},
        "slowness": _SLOWNESS,
        "h": {"type": "number", "exclusiveMinimum": 0},
        "u0": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["distance", "vertex"]},
                "values": {"type": "object", "additionalProperties": {"type": "number"}},
            },
        },
    },
}

_WEIGHTS_SCHEMA = {
    "type": "object",
    "properties": {
        "alpha": {"type": "object", "additionalProperties": {"type": "number", "minimum": 0}},
        "beta": {"type": "object", "additionalProperties": {"type": "number", "minimum": 0}},
    },
}


def parse_slowness(doc: dict, path: str = "$.slowness") -> SlownessField:
    validate_schema(doc, _SLOWNESS)
    kind = doc["kind"]
    try:
        if kind == "constant":
            return SlownessField.constant(doc["c"])
        if kind == "norm":
            return SlownessField.norm()
        return SlownessField.per_edge({int(j): v for j, v in doc["table"].items()})
    except NonPositiveSlowness as err:
        raise NonPositiveSlowness(err.message, f"{path}.{err.path}") from None


@dataclass(frozen=True)
class ScenarioDoc:
    """A parsed scenario, still independent of the grid resolution."""

    r0: Any  # "all" or list of locations
    x0: int
    delta: float
    slowness: SlownessField
    h: float | None = None
    u0: dict = field(default_factory=lambda: {"kind": "distance"})

    def sources(self, grid: Grid) -> SourceSet:
        if self.r0 == "all":
            return SourceSet.everywhere(grid)
        return SourceSet.from_locations(grid, self.r0)

    def scenario(self, grid: Grid) -> Scenario:
        return Scenario(self.sources(grid), self.x0, self.delta)

    def initial_datum(self, grid: Grid) -> np.ndarray:
        """``u0`` on the grid; its zero sublevel set is the initial fire."""
        if self.u0["kind"] == "distance":
            # path distance to R0: u0 <= 0 exactly on the source nodes
            return solve_distance(grid, SlownessField.constant(1.0), self.sources(grid)).values.copy()
        vals = self.u0["values"]
        n = grid.n_vertices
        missing = [i for i in range(n) if str(i) not in vals]
        if missing:
            raise SchemaError(f"missing values for vertices {missing}", "$.u0.values")
        out = np.empty(grid.n_nodes)
        out[:n] = [float(vals[str(i)]) for i in range(n)]
        for j, e in enumerate(grid.network.edges):
            a, b = out[e.tail], out[e.head]
            for node, s in zip(grid.edge_nodes[j][1:-1], grid.edge_s[j][1:-1]):
                out[node] = a + (b - a) * (s / e.length)
        return out


def _resolve_x0(net: Network, x0) -> int:
    if isinstance(x0, int):
        if x0 >= net.n_vertices:
            raise SchemaError(f"no vertex {x0}", "$.x0")
        return x0
    for v in net.vertices:
        if math.isclose(v.x, x0[0], abs_tol=1e-9) and math.isclose(v.y, x0[1], abs_tol=1e-9):
            return v.id
    raise SchemaError(f"no vertex at coordinates {tuple(x0)}", "$.x0")


def _check_locations(net: Network, r0) -> None:
    if r0 == "all":
        return
    for k, loc in enumerate(r0):
        if isinstance(loc, int):
            if loc >= net.n_vertices:
                raise SchemaError(f"no vertex {loc}", f"$.R0[{k}]")
        else:
            j, s = loc["edge"], loc["s"]
            if j >= net.n_edges:
                raise SchemaError(f"no edge {j}", f"$.R0[{k}].edge")
            if not 0 <= s <= net.edges[j].length:
                raise SchemaError(f"arclength {s} outside edge {j}", f"$.R0[{k}].s")


def scenario_from_dict(doc: dict, net: Network) -> ScenarioDoc:
    validate_schema(doc, _SCENARIO_SCHEMA)
    _check_locations(net, doc["R0"])
    r0 = doc["R0"] if doc["R0"] == "all" else [
        loc if isinstance(loc, int) else (loc["edge"], float(loc["s"])) for loc in doc["R0"]
    ]
    slowness = parse_slowness(doc["slowness"])
    if slowness.kind == "per_edge":
        missing = [j for j in range(net.n_edges) if j not in slowness.table]
        if missing:
            raise SchemaError(f"missing slowness for edges {missing}", "$.slowness.table")
    u0 = doc.get("u0", {"kind": "distance"})
    if u0["kind"] == "vertex" and "values" not in u0:
        raise SchemaError("'values' is a required property", "$.u0")
    return ScenarioDoc(
        r0=r0,
        x0=_resolve_x0(net, doc["x0"]),
        delta=float(doc["delta"]),
        slowness=slowness,
        h=doc.get("h"),
        u0=u0,
    )


def _read_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise SchemaError("file not found", str(path)) from None
    except json.JSONDecodeError as err:
        raise SchemaError(f"invalid JSON: {err}", str(path)) from None


def parse_scenario(path, net: Network) -> ScenarioDoc:
    return scenario_from_dict(_read_json(path), net)


def parse_weights(path) -> CostWeights:
    doc = _read_json(path)
    validate_schema(doc, _WEIGHTS_SCHEMA)
    return CostWeights(
        alpha={int(k): float(v) for k, v in doc.get("alpha", {}).items()},
        beta={int(k): float(v) for k, v in doc.get("beta", {}).items()},
    )


@dataclass(frozen=True)
class RunConfig:
    command: str
    network: Path
    scenario: Path
    h: float
    out: Path
    times: tuple[float, ...] = ()
    weights: Path | None = None
    override_sigma: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise SchemaError(f"unknown command {self.command!r}", "command")
        for name in ("network", "scenario"):
            if not Path(getattr(self, name)).is_file():
                raise SchemaError("file not found", f"--{name}")
        if self.weights is not None and not Path(self.weights).is_file():
            raise SchemaError("file not found", "--weights")
        if not (self.h > 0 and math.isfinite(self.h)):
            raise SchemaError("grid step must be positive", "--h")
        if list(self.times) != sorted(self.times) or any(t < 0 for t in self.times):
            raise SchemaError("snapshot times must be nonnegative and ascending", "--times")


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(doc) -> str:
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"

