"""Tropicalization of ``f_{r,s}``: subdivision, dual curve, cycle and smoothness.

Conventions are min-plus.  A lifted point ``(i, j, u_ij)`` belongs to the
regular subdivision through the lower faces of its convex hull; a face
with plane ``z = alpha*i + beta*j + gamma`` is dual to the curve vertex
``(-alpha, -beta)``.  Lengths are always lattice lengths.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import DisagreementBug, NoCycle, UnknownCoefficientValuation
from .series import AtLeast, Known, Valuation
from .serialize import rat

Point = tuple[int, int]
QPoint = tuple[Fraction, Fraction]

SUPPORT_NAMES: dict[Point, str] = {
    (1, 0): "u12",
    (0, 1): "u12",
    (2, 0): "u34",
    (0, 2): "u34",
    (1, 1): "u5",
    (2, 1): "u67",
    (1, 2): "u67",
    (2, 2): "u8",
}
NEWTON_CORNERS: tuple[Point, ...] = ((1, 0), (2, 0), (2, 2), (0, 2), (0, 1))
POLYGON_KINDS = {3: "Triangle", 4: "Square", 5: "Pentagon", 6: "Hexagon", 7: "Heptagon"}

# each row: three linear forms in (u12, u34, u5, u67, u8) that must be < 0
TABLE1: dict[str, tuple[tuple[int, int, int, int, int], ...]] = {
    "Triangle": ((0, -1, 0, 2, -1), (1, 0, -1, -1, 1), (-2, 0, 3, 0, -1)),
    "Square": ((0, 0, -1, 2, -1), (-1, 0, 2, -1, 0), (1, -1, -1, 1, 0)),
    "Pentagon": ((0, 0, 1, -2, 1), (-1, 0, 1, 1, -1), (1, -1, -1, 1, 0)),
    "Hexagon": ((0, 0, -1, 2, -1), (0, -1, 1, 0, 0), (-1, 1, 1, -1, 0)),
    "Heptagon": ((0, 0, 1, -2, 1), (0, -1, 0, 2, -1), (-1, 1, 1, -1, 0)),
}
U_ORDER = ("u12", "u34", "u5", "u67", "u8")


def _as_valuation(v) -> Valuation:
    return v if isinstance(v, Valuation) else Known(v)


@dataclass(frozen=True)
class TropPolynomial:
    """``min(u_ij + i*X + j*Y)`` over the fixed eight-point support."""

    support: tuple[tuple[int, int, Valuation], ...]

    @classmethod
    def from_u(cls, u: Mapping[str, object] | object) -> "TropPolynomial":
        if not isinstance(u, Mapping):
            u = u.as_dict()
        vals = {name: _as_valuation(u[name]) for name in U_ORDER}
        support = tuple((i, j, vals[name]) for (i, j), name in SUPPORT_NAMES.items())
        known = sum(1 for _, _, v in support if v.known)
        if known < 3:
            raise UnknownCoefficientValuation("fewer than three known coefficients: no curve")
        return cls(support)

    def u_vector(self) -> dict[str, Valuation]:
        return {SUPPORT_NAMES[(i, j)]: v for i, j, v in self.support}

    def known_points(self) -> dict[Point, Fraction]:
        return {(i, j): v.value for i, j, v in self.support if v.known}


def trop_eval(f: TropPolynomial, X, Y) -> tuple[Fraction, frozenset[Point]]:
    X, Y = Fraction(X), Fraction(Y)
    known = {p: u + p[0] * X + p[1] * Y for p, u in f.known_points().items()}
    best = min(known.values())
    for i, j, v in f.support:
        if not v.known and v.value + i * X + j * Y <= best:
            raise UnknownCoefficientValuation(f"u at {(i, j)} is only bounded below and may attain the min")
    return best, frozenset(p for p, val in known.items() if val == best)


# -- planar helpers ---------------------------------------------------------


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_corners(points: Iterable[Point]) -> list[Point]:
    """Counterclockwise hull corners (collinear points dropped), starting at the lowest-then-leftmost."""
    pts = sorted(set(points), key=lambda p: (p[1], p[0]))
    if len(pts) <= 2:
        return pts
    base = pts[0]
    rest = sorted(pts[1:], key=lambda p: (math.atan2(p[1] - base[1], p[0] - base[0]), abs(p[0] - base[0]) + abs(p[1] - base[1])))
    hull = [base]
    for p in rest:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    return hull


def polygon_area(poly: list[Point]) -> Fraction:
    s = 0
    for k in range(len(poly)):
        x0, y0 = poly[k]
        x1, y1 = poly[(k + 1) % len(poly)]
        s += x0 * y1 - x1 * y0
    return Fraction(abs(s), 2)


def primitive(v) -> tuple[int, int]:
    a, b = v
    if isinstance(a, Fraction) or isinstance(b, Fraction):
        a, b = Fraction(a), Fraction(b)
        m = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
        a, b = int(a * m), int(b * m)
    g = math.gcd(a, b)
    return (a // g, b // g)


def lattice_length(v) -> Fraction:
    """``lambda`` with ``v = lambda * primitive(v)``."""
    p = primitive(v)
    return Fraction(v[0]) / p[0] if p[0] else Fraction(v[1]) / p[1]


# -- regular subdivision ----------------------------------------------------


@dataclass(frozen=True)
class Cell:
    corners: tuple[Point, ...]
    points: frozenset[Point]
    plane: tuple[Fraction, Fraction, Fraction]

    def area(self) -> Fraction:
        return polygon_area(list(self.corners))

    def edges(self) -> list[tuple[Point, Point]]:
        c = self.corners
        return [(c[k], c[(k + 1) % len(c)]) for k in range(len(c))]


@dataclass(frozen=True)
class Subdivision:
    cells: tuple[Cell, ...]
    lifted_heights: dict[Point, Fraction] = field(compare=False)

    def to_json(self) -> dict:
        return {"cells": [[list(p) for p in c.corners] for c in self.cells]}


def _plane(p, q_, r):
    (x1, y1, z1), (x2, y2, z2), (x3, y3, z3) = p, q_, r
    det = (x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1)
    if det == 0:
        return None
    a = Fraction((z2 - z1) * (y3 - y1) - (z3 - z1) * (y2 - y1), det)
    b = Fraction((x2 - x1) * (z3 - z1) - (x3 - x1) * (z2 - z1), det)
    return a, b, z1 - a * x1 - b * y1


def _lower_faces(heights: Mapping[Point, Fraction]) -> list[Cell]:
    lifted = [(i, j, Fraction(u)) for (i, j), u in heights.items()]
    planes = {}
    for tri in itertools.combinations(lifted, 3):
        pl = _plane(*tri)
        if pl is None or pl in planes:
            continue
        a, b, c = pl
        if all(z >= a * x + b * y + c for x, y, z in lifted):
            on = frozenset((x, y) for x, y, z in lifted if z == a * x + b * y + c)
            planes[pl] = on
    cells = [Cell(tuple(convex_corners(on)), on, pl) for pl, on in planes.items()]
    return sorted(cells, key=lambda c: c.corners)


def _hull_height(cells: list[Cell], p: Point) -> Fraction:
    """Height of the lower envelope above ``p`` (max over face planes)."""
    return max(c.plane[0] * p[0] + c.plane[1] * p[1] + c.plane[2] for c in cells)


def regular_subdivision(f: TropPolynomial) -> Subdivision:
    heights = f.known_points()
    for corner in NEWTON_CORNERS:
        if corner not in heights:
            raise UnknownCoefficientValuation(f"corner {corner} of the Newton polygon needs a known valuation")
    cells = _lower_faces(heights)
    for i, j, v in f.support:
        if not v.known and v.value <= _hull_height(cells, (i, j)):
            raise UnknownCoefficientValuation(
                f"u at {(i, j)} is only known to be >= {v.value}, which does not decide the hull"
            )
    return Subdivision(tuple(cells), dict(heights))


def subdivision_smoothness(sub: Subdivision) -> bool:
    return all(len(c.corners) == 3 and c.area() == Fraction(1, 2) and len(c.points) == 3 for c in sub.cells)


# -- dual curve -------------------------------------------------------------


@dataclass(frozen=True)
class Edge:
    start: int
    end: int
    weight: int
    direction: tuple[int, int]


@dataclass(frozen=True)
class Ray:
    at: int
    direction: tuple[int, int]
    weight: int


@dataclass(frozen=True)
class TropicalCurve:
    vertices: tuple[QPoint, ...]
    edges: tuple[Edge, ...]
    rays: tuple[Ray, ...]
    subdivision: Subdivision | None = None

    def balancing_defects(self) -> dict[int, tuple[int, int]]:
        acc = {k: [0, 0] for k in range(len(self.vertices))}
        for e in self.edges:
            d = e.direction
            acc[e.start][0] += e.weight * d[0]
            acc[e.start][1] += e.weight * d[1]
            acc[e.end][0] -= e.weight * d[0]
            acc[e.end][1] -= e.weight * d[1]
        for r in self.rays:
            acc[r.at][0] += r.weight * r.direction[0]
            acc[r.at][1] += r.weight * r.direction[1]
        return {k: tuple(v) for k, v in acc.items() if v != [0, 0]}

    def is_balanced(self) -> bool:
        return not self.balancing_defects()

    def betti_number(self) -> int:
        parent = list(range(len(self.vertices)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        cycles = 0
        for e in self.edges:
            ra, rb = find(e.start), find(e.end)
            if ra == rb:
                cycles += 1
            else:
                parent[ra] = rb
        return cycles

    def contains(self, X, Y) -> bool:
        """Membership in the embedded edge set, checked geometrically."""
        p = (Fraction(X), Fraction(Y))
        if p in self.vertices:
            return True
        for e in self.edges:
            if _on_segment(self.vertices[e.start], self.vertices[e.end], p):
                return True
        for r in self.rays:
            o = self.vertices[r.at]
            d = (p[0] - o[0], p[1] - o[1])
            if d[0] * r.direction[1] - d[1] * r.direction[0] == 0 and d[0] * r.direction[0] + d[1] * r.direction[1] >= 0:
                return True
        return False

    def to_json(self) -> dict:
        out = {
            "vertices": [[rat(x), rat(y)] for x, y in self.vertices],
            "edges": [
                {"from": e.start, "to": e.end, "weight": e.weight, "dir": list(e.direction)} for e in self.edges
            ],
            "rays": [{"at": r.at, "dir": list(r.direction), "weight": r.weight} for r in self.rays],
        }
        if self.subdivision is not None:
            out["subdivision"] = self.subdivision.to_json()
        return out


def _on_segment(a: QPoint, b: QPoint, p: QPoint) -> bool:
    if (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) != 0:
        return False
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def _newton_boundary_contains(a: Point, b: Point) -> bool:
    corners = NEWTON_CORNERS
    for k in range(len(corners)):
        c0, c1 = corners[k], corners[(k + 1) % len(corners)]
        if _cross(c0, c1, a) == 0 and _cross(c0, c1, b) == 0:
            return True
    return False


def dual_curve(sub: Subdivision, f: TropPolynomial | None = None) -> TropicalCurve:
    verts = []
    for c in sub.cells:
        verts.append((-c.plane[0], -c.plane[1]))
    order = sorted(range(len(verts)), key=lambda k: verts[k])
    index = {old: new for new, old in enumerate(order)}
    vertices = tuple(verts[k] for k in order)

    owners: dict[frozenset, list[int]] = {}
    for k, c in enumerate(sub.cells):
        for a, b in c.edges():
            owners.setdefault(frozenset((a, b)), []).append(index[k])
    edges, rays = [], []
    for seg, cells in sorted(owners.items(), key=lambda kv: sorted(kv[0])):
        a, b = sorted(seg)
        w = math.gcd(b[0] - a[0], b[1] - a[1])
        if len(cells) == 2:
            s, t = sorted(cells)
            d = (vertices[t][0] - vertices[s][0], vertices[t][1] - vertices[s][1])
            edges.append(Edge(s, t, w, primitive(d)))
        elif len(cells) == 1:
            if not _newton_boundary_contains(a, b):
                raise DisagreementBug(f"unpaired interior subdivision edge {a}-{b}")
            # inward normal of the boundary edge: min is attained there as (X,Y) runs that way
            ex, ey = b[0] - a[0], b[1] - a[1]
            n = primitive((-ey, ex))
            # (1,1) is interior to the Newton polygon: orient the normal toward it
            mid2 = (a[0] + b[0], a[1] + b[1])
            if (2 - mid2[0]) * n[0] + (2 - mid2[1]) * n[1] < 0:
                n = (-n[0], -n[1])
            rays.append(Ray(cells[0], n, w))
        else:
            raise DisagreementBug(f"subdivision edge {a}-{b} shared by {len(cells)} cells")
    curve = TropicalCurve(vertices, tuple(edges), tuple(rays), sub)
    if not curve.is_balanced():
        raise DisagreementBug(f"unbalanced vertices {curve.balancing_defects()}")
    return curve


def tropical_curve(f: TropPolynomial) -> TropicalCurve:
    return dual_curve(regular_subdivision(f), f)


# -- cycle ------------------------------------------------------------------


@dataclass(frozen=True)
class CycleMeasure:
    kind: str
    lattice_length: Fraction
    polygon: tuple[QPoint, ...]


def cycle_vertices(curve: TropicalCurve) -> list[int]:
    """Vertices of the unique bounded cycle, counterclockwise from the smallest."""
    if curve.betti_number() == 0:
        raise NoCycle("the bounded part of the curve is a tree")
    if curve.betti_number() > 1:
        raise DisagreementBug("more than one independent cycle for a single interior point")
    adj: dict[int, set[int]] = {k: set() for k in range(len(curve.vertices))}
    for e in curve.edges:
        adj[e.start].add(e.end)
        adj[e.end].add(e.start)
    alive = set(adj)
    changed = True
    while changed:
        changed = False
        for v in list(alive):
            if len(adj[v] & alive) <= 1:
                alive.discard(v)
                changed = True
    start = min(alive, key=lambda k: curve.vertices[k])
    loop = [start]
    prev = None
    cur = start
    while True:
        nxt = sorted(n for n in adj[cur] & alive if n != prev)
        step = nxt[0]
        if step == start:
            break
        if len(loop) > 1 and step == loop[-2]:
            step = nxt[1]
        if step == start:
            break
        loop.append(step)
        prev, cur = cur, step
    pts = [curve.vertices[k] for k in loop]
    area2 = sum(pts[k][0] * pts[(k + 1) % len(pts)][1] - pts[(k + 1) % len(pts)][0] * pts[k][1] for k in range(len(pts)))
    if area2 < 0:
        loop = [loop[0]] + loop[1:][::-1]
    return loop


def corner_points(points: list[QPoint]) -> list[QPoint]:
    """Drop collinear pass-through points of a closed polygon."""
    out = []
    n = len(points)
    for k in range(n):
        a, b, c = points[k - 1], points[k], points[(k + 1) % n]
        if _cross(a, b, c) != 0:
            out.append(b)
    return out


def cycle_measure(curve: TropicalCurve) -> CycleMeasure:
    loop = cycle_vertices(curve)
    pts = [curve.vertices[k] for k in loop]
    length = Fraction(0)
    for k in range(len(pts)):
        a, b = pts[k], pts[(k + 1) % len(pts)]
        length += lattice_length((b[0] - a[0], b[1] - a[1]))
    corners = corner_points(pts)
    kind = POLYGON_KINDS.get(len(corners), f"{len(corners)}-gon")
    return CycleMeasure(kind, length, tuple(corners))


# -- smoothness -------------------------------------------------------------


def _u_values(u) -> dict[str, Valuation]:
    if isinstance(u, TropPolynomial):
        return u.u_vector()
    if not isinstance(u, Mapping):
        u = u.as_dict()
    return {k: _as_valuation(u[k]) for k in U_ORDER}


def _decide_negative(form, vals: dict[str, Valuation]) -> bool:
    lo = hi = Fraction(0)
    lo_inf = hi_inf = False
    for c, name in zip(form, U_ORDER):
        if c == 0:
            continue
        v = vals[name]
        if v.known:
            lo += c * v.value
            hi += c * v.value
        elif c > 0:
            lo += c * v.value
            hi_inf = True
        else:
            hi += c * v.value
            lo_inf = True
    if not hi_inf and hi < 0:
        return True
    if not lo_inf and lo >= 0:
        return False
    raise UnknownCoefficientValuation(f"inequality {form} < 0 undecided by the known bounds")


def table1_smoothness(u, kind: str) -> bool:
    if kind not in TABLE1:
        raise ValueError(f"no smoothness row for kind {kind!r}")
    vals = _u_values(u)
    return all(_decide_negative(form, vals) for form in TABLE1[kind])


# -- classification ---------------------------------------------------------


@dataclass(frozen=True)
class CycleReport:
    polygon_kind: str
    lattice_length: Fraction | None
    delta: Fraction
    smooth_by_table1: bool | None
    smooth_by_subdivision: bool
    predicted_kind: str
    predicted_length: Fraction
    u: dict
    curve: TropicalCurve
    polygon: tuple[QPoint, ...] = ()

    @property
    def smooth(self) -> bool:
        return bool(self.smooth_by_subdivision)

    def to_json(self) -> dict:
        return {
            "polygon_kind": self.polygon_kind,
            "lattice_length": None if self.lattice_length is None else rat(self.lattice_length),
            "delta": rat(self.delta),
            "predicted": {"kind": self.predicted_kind, "length": rat(self.predicted_length)},
            "smooth_by_table1": self.smooth_by_table1,
            "smooth_by_subdivision": self.smooth_by_subdivision,
            "smooth": self.smooth,
            "u": {k: {"kind": "Known" if v.known else "AtLeast", "value": rat(v.value)} for k, v in self.u.items()},
            "cycle_polygon": [[rat(x), rat(y)] for x, y in self.polygon],
            "curve": self.curve.to_json(),
        }


def classify_u(u, delta: Fraction) -> CycleReport:
    """Classify a curve from its coefficient valuations, with ``delta`` used only for the prediction."""
    from .thetaparam import delta_shape

    f = TropPolynomial.from_u(u)
    curve = tropical_curve(f)
    predicted = delta_shape(delta)
    smooth_sub = subdivision_smoothness(curve.subdivision)
    try:
        m = cycle_measure(curve)
        kind, length, poly = m.kind, m.lattice_length, m.polygon
    except NoCycle:
        kind, length, poly = "None", None, ()
    smooth_t1 = None
    if kind in TABLE1:
        smooth_t1 = table1_smoothness(f, kind)
        if smooth_t1 != smooth_sub:
            raise DisagreementBug(f"inequality table says {smooth_t1}, subdivision says {smooth_sub} for {kind}")
    if predicted.kind != "Degenerate":
        if (kind, length) != (predicted.kind, predicted.length):
            raise DisagreementBug(
                f"predicted {predicted.kind}/{predicted.length} but measured {kind}/{length}"
            )
        report_kind = kind
    else:
        report_kind = "Degenerate"
    return CycleReport(
        report_kind, length, delta, smooth_t1, smooth_sub, predicted.kind, predicted.length,
        f.u_vector(), curve, poly,
    )


def classify(params) -> CycleReport:
    from .edwards import family_coefficients, trop_valuations

    delta = params.delta()
    u = trop_valuations(family_coefficients(params))
    return classify_u(u, delta)
