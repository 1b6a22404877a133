"""SVG figures of fields and strategies.

Figures are drawn on a bare :class:`~matplotlib.figure.Figure` (no pyplot
state) and saved with a fixed hash salt and no timestamp, so identical
inputs give byte-identical files.
"""

from __future__ import annotations

import io
import math
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import numpy as np  # noqa: E402
from matplotlib.backends.backend_svg import FigureCanvasSVG  # noqa: E402
from matplotlib.collections import LineCollection  # noqa: E402
from matplotlib.colors import Normalize  # noqa: E402
from matplotlib.cm import ScalarMappable  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

from .metrics import NodeField  # noqa: E402
from .network import Network  # noqa: E402

UNREACHED = "#9a9a9a"
CMAP = "viridis"

_RC = {
    "svg.hashsalt": "netblaze",
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.titlesize": 10,
}


def _to_svg(fig: Figure) -> str:
    buf = io.StringIO()
    with matplotlib.rc_context(_RC):
        FigureCanvasSVG(fig)
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def viewport(net: Network, margin: float = 0.05) -> tuple[float, float, float, float]:
    """Vertex bounding box grown by ``margin`` of its extent on every side."""
    xs = [v.x for v in net.vertices]
    ys = [v.y for v in net.vertices]
    dx = (max(xs) - min(xs)) or 1.0
    dy = (max(ys) - min(ys)) or 1.0
    return (min(xs) - margin * dx, max(xs) + margin * dx, min(ys) - margin * dy, max(ys) + margin * dy)


def scene(
    field: NodeField,
    title: str = "",
    sources: Iterable[int] = (),
    squares: Iterable[int] = (),
    hollow_squares: Iterable[int] = (),
    operator: int | None = None,
    burnt_edges: Iterable[int] | None = None,
    label: str = "time",
) -> str:
    """Network scene colored by node values.

    Circles mark source nodes, rhombi ordinary vertices, filled squares the
    blocked vertices and hollow squares the admissible ones.  When
    ``burnt_edges`` is given, burnt edges are thick and preserved ones thin.
    """
    g = field.grid
    net = g.network
    finite = field.values[np.isfinite(field.values)]
    vmax = float(finite.max()) if len(finite) and finite.max() > 0 else 1.0
    norm = Normalize(0.0, vmax)
    cmap = matplotlib.colormaps[CMAP]
    burnt = None if burnt_edges is None else set(burnt_edges)

    segs, colors, widths = [], [], []
    for j in range(net.n_edges):
        vals = field.along_edge(j)
        pts = g.coords[g.edge_nodes[j]]
        for m in range(len(vals) - 1):
            segs.append([tuple(pts[m]), tuple(pts[m + 1])])
            a, b = vals[m], vals[m + 1]
            colors.append(UNREACHED if math.isinf(a) or math.isinf(b) else cmap(norm(0.5 * (a + b))))
            widths.append(2.0 if burnt is None else (3.2 if j in burnt else 0.8))

    fig = Figure(figsize=(6.0, 5.0))
    ax = fig.add_subplot()
    ax.add_collection(LineCollection(segs, colors=colors, linewidths=widths, capstyle="round"))

    special = set(squares) | set(hollow_squares)
    plain = [i for i in range(net.n_vertices) if i not in special]
    vc = g.coords[: net.n_vertices]
    ax.scatter(vc[plain, 0], vc[plain, 1], marker="D", s=14, c="white", edgecolors="black", linewidths=0.6, zorder=3, label="vertex")
    hol = sorted(set(hollow_squares) - set(squares))
    if hol:
        ax.scatter(vc[hol, 0], vc[hol, 1], marker="s", s=40, facecolors="none", edgecolors="black", linewidths=0.9, zorder=4, label="admissible")
    sq = sorted(set(squares))
    if sq:
        ax.scatter(vc[sq, 0], vc[sq, 1], marker="s", s=44, c="black", zorder=5, label="blocked")
    src = sorted(set(sources))
    if src:
        sc = g.coords[src]
        ax.scatter(sc[:, 0], sc[:, 1], marker="o", s=46, c="#d62728", edgecolors="black", linewidths=0.6, zorder=6, label="fire origin")
    if operator is not None:
        ax.scatter([vc[operator, 0]], [vc[operator, 1]], marker="^", s=60, c="#1f77b4", edgecolors="black", linewidths=0.6, zorder=6, label="operation center")

    x0, x1, y0, y1 = viewport(net)
    ax.set_xlim(x0, x1)
    ax.set_ylim(y0, y1)
    ax.set_aspect("equal")
    ax.set_title(title)
    ax.legend(loc="upper left", bbox_to_anchor=(1.22, 1.0), frameon=False, fontsize=7)
    fig.colorbar(ScalarMappable(norm=norm, cmap=cmap), ax=ax, label=label, fraction=0.046, pad=0.04)
    fig.subplots_adjust(left=0.08, right=0.72, bottom=0.08, top=0.92)
    return _to_svg(fig)


def burnt_length_curve(times: Sequence[float], lengths: Sequence[float], total: float, title: str = "") -> str:
    """Burnt length against time, with the total network length for reference."""
    fig = Figure(figsize=(5.0, 3.4))
    ax = fig.add_subplot()
    ax.step(times, lengths, where="post", color="#d62728", marker="o", ms=3)
    ax.axhline(total, color="0.5", lw=0.8, ls="--", label="total length")
    ax.set_xlabel("t")
    ax.set_ylabel("burnt length")
    ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    return _to_svg(fig)
