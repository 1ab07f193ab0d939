"""Static figures: tropical curves, subdivisions, cycle loci and metric graphs.

Everything enters as the exact JSON emitted by the CLI; rationals are turned
into decimals only here, rounded half-even to six places, and the SVG writer
is pinned so that equal inputs give byte-identical files.
"""

from __future__ import annotations

import io
import math
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

SVG_RC = {
    "svg.hashsalt": "tropedwards",
    "svg.fonttype": "none",
    "path.simplify": False,
    "font.family": "DejaVu Sans",
    "font.size": 8,
}
RAY_LENGTH = 1.5
SWEEP_DELTAS = (Fraction(-5, 2), Fraction(-3, 2), Fraction(-1, 2), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(9, 4))


def dec(x) -> float:
    """Rational (or ``[num, den]``) to a float rounded half-even at six decimals."""
    if isinstance(x, list):
        x = Fraction(x[0], x[1])
    d = Decimal(Fraction(x).numerator) / Decimal(Fraction(x).denominator)
    return float(d.quantize(Decimal("0.000001"), rounding=ROUND_HALF_EVEN))


def _pt(p) -> tuple[float, float]:
    return dec(p[0]), dec(p[1])


def draw_curve(ax, curve: dict, title: str | None = None) -> None:
    verts = [_pt(v) for v in curve["vertices"]]
    for e in curve["edges"]:
        (x0, y0), (x1, y1) = verts[e["from"]], verts[e["to"]]
        ax.plot([x0, x1], [y0, y1], color="black", lw=1.2 + 0.6 * (e["weight"] - 1))
        if e["weight"] > 1:
            ax.annotate(str(e["weight"]), ((x0 + x1) / 2, (y0 + y1) / 2), color="tab:red")
    for r in curve["rays"]:
        x0, y0 = verts[r["at"]]
        dx, dy = r["dir"]
        n = math.hypot(dx, dy)
        x1, y1 = x0 + RAY_LENGTH * dx / n, y0 + RAY_LENGTH * dy / n
        ax.plot([x0, x1], [y0, y1], color="tab:blue", lw=1.0 + 0.6 * (r["weight"] - 1))
        if r["weight"] > 1:
            ax.annotate(str(r["weight"]), (x1, y1), color="tab:red")
    if verts:
        ax.scatter([v[0] for v in verts], [v[1] for v in verts], s=10, color="black", zorder=3)
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)


def draw_subdivision(ax, sub: dict, title: str | None = None) -> None:
    for cell in sub["cells"]:
        xs = [p[0] for p in cell] + [cell[0][0]]
        ys = [p[1] for p in cell] + [cell[0][1]]
        area2 = abs(sum(cell[k][0] * cell[(k + 1) % len(cell)][1] - cell[(k + 1) % len(cell)][0] * cell[k][1]
                        for k in range(len(cell))))
        unimodular = len(cell) == 3 and area2 == 1
        ax.fill(xs, ys, color="tab:green" if unimodular else "tab:orange", alpha=0.35)
        ax.plot(xs, ys, color="black", lw=1.0)
    pts = [(i, j) for i in range(3) for j in range(3) if (i, j) not in ((0, 0),)]
    ax.scatter([p[0] for p in pts], [p[1] for p in pts], s=12, color="black", zorder=3)
    ax.set_aspect("equal")
    ax.set_xticks([0, 1, 2])
    ax.set_yticks([0, 1, 2])
    if title:
        ax.set_title(title)


def draw_cycle(ax, cyc: dict, title: str | None = None) -> None:
    pts = [_pt(p) for p in cyc["samples"]]
    ax.scatter([p[0] for p in pts], [p[1] for p in pts], s=4, color="tab:gray")
    poly = [_pt(p) for p in cyc["reconstructed_polygon"]]
    if poly:
        xs = [p[0] for p in poly] + [poly[0][0]]
        ys = [p[1] for p in poly] + [poly[0][1]]
        ax.plot(xs, ys, color="tab:red", lw=1.4)
    ax.set_aspect("equal")
    if title is None:
        m = cyc.get("measured", cyc.get("predicted"))
        title = f"delta={dec(cyc['delta']):g}: {m['kind']} {dec(m['length']):g}"
    ax.set_title(title)


def _graph_layout(graph: dict) -> dict[str, tuple[float, float]]:
    """Central nodes on a line (or circle for quotients); branches hang off sideways."""
    nodes = graph["nodes"]
    edges = graph["edges"]
    adj: dict[str, list[tuple[str, float]]] = {n: [] for n in nodes}
    for e in edges:
        adj[e["a"]].append((e["b"], dec(e["len"])))
        adj[e["b"]].append((e["a"], dec(e["len"])))
    central = [n for n in nodes if n.startswith("c") or (n.startswith("r") and "." not in n)]
    pos: dict[str, tuple[float, float]] = {}
    if graph.get("cycle_len"):
        circ = dec(graph["cycle_len"])
        rad = circ / (2 * math.pi)
        for n in central:
            h = float(Fraction(n[1:]))
            ang = 2 * math.pi * h / circ
            pos[n] = (rad * math.cos(ang), rad * math.sin(ang))
    else:
        for n in central:
            pos[n] = (0.0, float(Fraction(n[1:])))
    stack = list(central)
    side = {n: 1 for n in central}
    while stack:
        n = stack.pop()
        kids = [m for m, _ in adj[n] if m not in pos]
        for k, (m, ln) in enumerate([(m, ln) for m, ln in adj[n] if m not in pos]):
            x, y = pos[n]
            if graph.get("cycle_len"):
                r = math.hypot(x, y) or 1.0
                spread = (k - (len(kids) - 1) / 2) * 0.3
                pos[m] = (x + ln * x / r + spread * -y / r, y + ln * y / r + spread * x / r)
            else:
                spread = (k - (len(kids) - 1) / 2) * 0.3
                pos[m] = (x + side[n] * ln, y + spread)
            side[m] = side[n]
            stack.append(m)
    return pos


def draw_metric_graph(ax, graph: dict, title: str | None = None) -> None:
    pos = _graph_layout(graph)
    if graph.get("cycle_len"):
        circ = dec(graph["cycle_len"])
        rad = circ / (2 * math.pi)
        ts = [2 * math.pi * k / 256 for k in range(257)]
        ax.plot([rad * math.cos(t) for t in ts], [rad * math.sin(t) for t in ts], color="black", lw=1.2)
    for e in graph["edges"]:
        a, b = pos[e["a"]], pos[e["b"]]
        if graph.get("cycle_len") and "." not in e["a"] and "." not in e["b"]:
            continue
        ax.plot([a[0], b[0]], [a[1], b[1]], color="black", lw=1.2)
    counts: dict[str, int] = {}
    for end in graph["ends"]:
        node = end["at"]
        k = counts.get(node, 0)
        counts[node] = k + 1
        x, y = pos[node]
        ang = math.atan2(y, x) if graph.get("cycle_len") else 0.0
        ang += (k - 0.5) * 0.6
        x1, y1 = x + 0.8 * math.cos(ang), y + 0.8 * math.sin(ang)
        ax.plot([x, x1], [y, y1], color="tab:blue", lw=1.0)
        if not graph.get("cycle_len"):
            ax.annotate(end["label"], (x1, y1), fontsize=5)
    ax.scatter([p[0] for p in pos.values()], [p[1] for p in pos.values()], s=8, color="black", zorder=3)
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)


def figure_to_svg(fig) -> str:
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return buf.getvalue()


def render(data: dict) -> str:
    """Pick a picture from the shape of ``data`` and return SVG text."""
    with matplotlib.rc_context(SVG_RC):
        if "sweep" in data:
            panels = data["sweep"]
            fig, axes = plt.subplots(1, len(panels), figsize=(2.2 * len(panels), 2.6))
            for ax, cyc in zip(axes, panels):
                draw_cycle(ax, cyc)
            fig.tight_layout()
            return figure_to_svg(fig)
        if "quotient" in data:
            fig, axes = plt.subplots(1, 3, figsize=(10, 4))
            draw_metric_graph(axes[0], data["tree"], "tree")
            draw_metric_graph(axes[1], data["squared_tree"], "squared")
            draw_metric_graph(axes[2], data["quotient"], "quotient mod q^8")
            fig.tight_layout()
            return figure_to_svg(fig)
        if "curve" in data:
            fig, axes = plt.subplots(1, 2, figsize=(8, 4))
            draw_curve(axes[0], data["curve"], f"{data.get('polygon_kind', '')}")
            draw_subdivision(axes[1], data["curve"]["subdivision"], "subdivision")
            fig.tight_layout()
            return figure_to_svg(fig)
        if "vertices" in data:
            fig, ax = plt.subplots(figsize=(4, 4))
            draw_curve(ax, data)
            return figure_to_svg(fig)
        if "cells" in data:
            fig, ax = plt.subplots(figsize=(4, 4))
            draw_subdivision(ax, data)
            return figure_to_svg(fig)
        if "samples" in data:
            fig, ax = plt.subplots(figsize=(4, 4))
            draw_cycle(ax, data)
            return figure_to_svg(fig)
        if "nodes" in data:
            fig, ax = plt.subplots(figsize=(5, 5))
            draw_metric_graph(ax, data)
            return figure_to_svg(fig)
    raise ValueError("unrecognized JSON schema")
