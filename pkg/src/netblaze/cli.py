"""``netblaze`` command-line front end.

    netblaze <command> --network F --scenario F --h H --out DIR
             [--times t1,t2,...] [--weights F] [--override-sigma ids]

Exit status: 0 success, 2 bad configuration or input, 3 solver error,
4 failed optimality verification.  Failures print a JSON error document on
stderr and also write it to ``DIR/error.json``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import plotting
from .blocking import (
    block_report,
    cost_optimal_strategy,
    optimal_strategy,
    scenario_fields,
    verify_optimality,
)
from .config import COMMANDS, RunConfig, atomic_write, dump_json, parse_scenario, parse_weights
from .errors import InvalidLocation, NetblazeError, NetworkError, SchemaError
from .hopflax import burnt_length, evolve, snapshot
from .metrics import NodeField, solve_distance
from .network import discretize, fmt, load_network

log = logging.getLogger("netblaze")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_VERIFY = 0, 2, 3, 4


class VerificationFailed(NetblazeError):
    code = "VerificationFailed"

    def __init__(self, result):
        self.result = result
        super().__init__(f"strategy {list(result.witness)} preserves an edge that sigma_opt burns")

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["witness"] = list(self.result.witness)
        d["sigma_opt"] = list(self.result.sigma_opt)
        return d


def _ids(text: str) -> tuple[int, ...]:
    text = text.strip()
    return tuple(int(t) for t in text.split(",")) if text else ()


def _times(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(",") if t.strip())


def _default_times(u: NodeField, n: int = 11) -> tuple[float, ...]:
    top = u.finite_max()
    return tuple(float(t) for t in np.linspace(0.0, top, n))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise SchemaError(message, "argv")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="netblaze", description="Fire fronts and junction blocking on metric networks.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--network", required=True, type=Path, help="network JSON")
    p.add_argument("--scenario", required=True, type=Path, help="scenario JSON")
    p.add_argument("--h", type=float, help="target grid step (defaults to the scenario's 'h')")
    p.add_argument("--out", required=True, type=Path, help="output directory")
    p.add_argument("--times", type=_times, default=(), help="comma separated snapshot times")
    p.add_argument("--weights", type=Path, help="cost weights JSON for 'cost'")
    p.add_argument("--override-sigma", type=_ids, default=None, help="comma separated vertex ids to block")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _write(out: Path, name: str, text: str) -> None:
    atomic_write(out / name, text)
    log.info("wrote %s", out / name)


def _series_csv(field: NodeField, t: float, values: np.ndarray) -> str:
    """Per-node snapshot: grid columns, the value at time ``t``, burnt flag."""
    g = field.grid
    lines = ["edge_id,m,s,x,y,value,burnt"]
    for j, nodes in enumerate(g.edge_nodes):
        arrival = field.along_edge(j)
        for m, node in enumerate(nodes):
            x, y = g.coords[node]
            burnt = int(arrival[m] <= t)
            lines.append(f"{j},{m},{fmt(g.edge_s[j][m])},{fmt(x)},{fmt(y)},{fmt(values[node])},{burnt}")
    return "\n".join(lines) + "\n"


def run(config: RunConfig) -> int:
    """Execute one command; raises :class:`NetblazeError` on failure."""
    out = Path(config.out)
    net = load_network(config.network)
    doc = parse_scenario(config.scenario, net)
    grid = discretize(net, config.h)
    c = doc.slowness
    scenario = doc.scenario(grid)

    if config.command == "distance":
        u = solve_distance(grid, c, scenario.r0)
        _write(out, "u.csv", u.to_csv())
        _write(out, "scene.svg", plotting.scene(u, "fire arrival time", sources=scenario.r0.nodes))

    elif config.command == "front":
        u = solve_distance(grid, c, scenario.r0)
        times = config.times or _default_times(u)
        files, lengths = [], []
        for k, t in enumerate(times):
            snap = snapshot(u, t)
            name = f"front_{k:03d}.csv"
            _write(out, name, _series_csv(u, t, u.values))
            files.append(name)
            lengths.append(snap.burnt_length)
        manifest = {"times": list(times), "total_length": net.total_length, "burnt_length": lengths, "files": files}
        _write(out, "manifest.json", dump_json(manifest))
        _write(out, "u.csv", u.to_csv())
        _write(out, "scene.svg", plotting.scene(u, "fire arrival time", sources=scenario.r0.nodes))
        _write(out, "front.svg", plotting.burnt_length_curve(times, lengths, net.total_length, "burnt length"))

    elif config.command == "evolve":
        u0 = doc.initial_datum(grid)
        sol = evolve(grid, c, u0)
        zero = np.flatnonzero(sol.levels <= 0)
        arrival = None
        if len(zero):
            arrival = NodeField(grid, sol.arrival[zero[-1]].copy())
        times = config.times or tuple(float(t) for t in np.linspace(0.0, sol.breakpoints()[-1], 11))
        files, lengths = [], []
        for k, t in enumerate(times):
            vals = sol(t)
            name = f"evolve_{k:03d}.csv"
            _write(out, name, NodeField(grid, vals.copy()).to_csv())
            files.append(name)
            lengths.append(burnt_length(grid, arrival.along_edge, t) if arrival is not None else 0.0)
        manifest = {"times": list(times), "total_length": net.total_length, "burnt_length": lengths, "files": files}
        _write(out, "manifest.json", dump_json(manifest))
        last = NodeField(grid, sol(times[-1]).copy())
        _write(out, "scene.svg", plotting.scene(last, f"u(x, t={times[-1]:g})", label="u"))

    elif config.command == "block":
        # step 1: fire arrival; step 2: operator arrival and admissible vertices
        u, w, v_ad = scenario_fields(grid, c, scenario)
        # step 3: optimal strategy and the blocked distance
        if config.override_sigma is not None:
            sigma = frozenset(config.override_sigma)
        else:
            sigma = optimal_strategy(net, v_ad)
        report = block_report(grid, c, scenario, sigma, allow_inadmissible=config.override_sigma is not None)
        _write(out, "u.csv", u.to_csv())
        _write(out, "w.csv", w.to_csv())
        _write(out, "ublocked.csv", report.field.to_csv())
        _write(out, "report.json", dump_json(report.to_dict()))
        _write(
            out,
            "scene.svg",
            plotting.scene(
                report.field,
                "blocked fire arrival time",
                sources=scenario.r0.nodes,
                squares=report.sigma,
                hollow_squares=report.admissible_vertices,
                operator=scenario.x0,
                burnt_edges=report.burnt_edges,
            ),
        )
        _write(
            out,
            "operator.svg",
            plotting.scene(w, "operator arrival time", hollow_squares=v_ad, operator=scenario.x0),
        )

    elif config.command == "verify":
        result = verify_optimality(grid, c, scenario)
        _write(out, "verify.json", dump_json(result.to_dict()))
        if not result.ok:
            raise VerificationFailed(result)

    elif config.command == "cost":
        if config.weights is None:
            raise SchemaError("the cost command needs --weights", "--weights")
        weights = parse_weights(config.weights)
        sigma, cost = cost_optimal_strategy(grid, c, scenario, weights)
        report = block_report(grid, c, scenario, sigma)
        _write(out, "cost.json", dump_json({"sigma": sorted(sigma), "cost": cost, "admissible_vertices": list(report.admissible_vertices)}))
        _write(out, "report.json", dump_json(report.to_dict()))
        _write(
            out,
            "scene.svg",
            plotting.scene(
                report.field,
                "cost-optimal blocking",
                sources=scenario.r0.nodes,
                squares=report.sigma,
                hollow_squares=report.admissible_vertices,
                operator=scenario.x0,
                burnt_edges=report.burnt_edges,
            ),
        )
    return EXIT_OK


def _exit_code(err: NetblazeError) -> int:
    if isinstance(err, VerificationFailed):
        return EXIT_VERIFY
    if isinstance(err, (SchemaError, NetworkError, InvalidLocation)):
        return EXIT_CONFIG
    return EXIT_SOLVER


def main(argv: list[str] | None = None) -> int:
    out = None
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
        out = args.out
        out.mkdir(parents=True, exist_ok=True)
        h = args.h
        if h is None:
            doc = json.loads(args.scenario.read_text()) if args.scenario.is_file() else {}
            h = doc.get("h") if isinstance(doc, dict) else None
            if h is None:
                raise SchemaError("no grid step given and the scenario has no 'h'", "--h")
        config = RunConfig(
            command=args.command,
            network=args.network,
            scenario=args.scenario,
            h=float(h),
            out=out,
            times=args.times,
            weights=args.weights,
            override_sigma=args.override_sigma,
        )
        return run(config)
    except NetblazeError as err:
        doc = err.to_dict()
        code = _exit_code(err)
    except (ValueError, json.JSONDecodeError) as err:
        doc = {"error": "SchemaError", "message": str(err)}
        code = EXIT_CONFIG
    doc["exit_code"] = code
    text = dump_json(doc)
    sys.stderr.write(text)
    if out is not None and Path(out).is_dir():
        atomic_write(Path(out) / "error.json", text)
    return code


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
