"""Divisors of the transformed coordinates and their Bruhat-Tits subtree.

Ends are points ``z = sign * sqrt(w) * q^e`` of the projective line.  Only
the square ``w`` of the unit is stored, because pole units may need an
imaginary principal coefficient; every quantity the tree needs depends on
``w`` alone.  The tree is assembled from balls: an end of valuation ``h``
leaves the central road ``[0, oo]`` at height ``h``, and ends of equal
height split apart at level ``v(z - z')``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import (
    DisagreementBug,
    IncompleteFundamentalDomain,
    InsufficientPrecision,
    NotASquare,
    NotSmooth,
    OffsetMismatch,
    UnderdeterminedFit,
)
from .series import BivariateSeries, PuiseuxSeries, theta_bar
from .serialize import rat

PERIOD = Fraction(8)
WINDOW = (Fraction(-1, 2), Fraction(15, 2))


# -- ends -------------------------------------------------------------------


@dataclass(frozen=True)
class End:
    """A point of the projective line; ``kind`` is ``finite``, ``zero`` or ``infinity``."""

    sign: int = 1
    unit_sq: PuiseuxSeries | None = None
    exponent: Fraction = Fraction(0)
    kind: str = "finite"
    label: str = field(default="", compare=False)

    @classmethod
    def zero(cls) -> "End":
        return cls(kind="zero", label="0")

    @classmethod
    def infinity(cls) -> "End":
        return cls(kind="infinity", label="oo")

    @property
    def finite(self) -> bool:
        return self.kind == "finite"

    def valuation(self) -> Fraction:
        if not self.finite:
            raise ValueError("0 and oo have no finite valuation")
        return self.exponent

    @property
    def unit(self) -> PuiseuxSeries:
        """The unit itself; needs a rational square root."""
        return self.unit_sq.sqrt()

    def _w0(self) -> Fraction:
        return self.unit_sq.principal_coefficient()

    def square(self) -> "End":
        if not self.finite:
            return self
        lab = self.label.lstrip("-")
        return End(1, self.unit_sq * self.unit_sq, 2 * self.exponent, "finite", f"({lab})^2" if lab else "")

    def scaled(self, exponent) -> "End":
        """Multiply by ``q^exponent``."""
        return End(self.sign, self.unit_sq, self.exponent + Fraction(exponent), self.kind, self.label)

    def negated(self) -> "End":
        return End(-self.sign, self.unit_sq, self.exponent, self.kind, self.label)

    def key(self) -> tuple:
        if not self.finite:
            return (self.kind,)
        return (self.sign, self.exponent, self.unit_sq.ram, tuple(self.unit_sq.terms.items()))

    def to_json(self) -> dict:
        if not self.finite:
            return {"kind": self.kind, "label": self.label}
        return {
            "kind": "finite",
            "sign": self.sign,
            "exponent": rat(self.exponent),
            "unit_sq": self.unit_sq.to_json(),
            "label": self.label,
        }


def diff_valuation(z: End, y: End) -> Fraction:
    """``v(z - y)`` for two distinct finite ends."""
    if z.exponent != y.exponent:
        return min(z.exponent, y.exponent)
    if z.sign != y.sign or z._w0() != y._w0():
        return z.exponent
    dv = (z.unit_sq - y.unit_sq).valuation()
    if not dv.known:
        raise InsufficientPrecision(f"cannot separate ends {z.label} and {y.label} at this truncation")
    return z.exponent + dv.value


def _factor_valuation(a: End, b: End) -> Fraction | None:
    """``v(a - b)``, or None when the factor involves oo and cancels."""
    if a.kind == "infinity" or b.kind == "infinity":
        return None
    if a.kind == "zero" and b.kind == "zero":
        raise ValueError("repeated end 0")
    if a.kind == "zero":
        return b.exponent
    if b.kind == "zero":
        return a.exponent
    return diff_valuation(a, b)


def cross_ratio_valuation(w: End, x: End, y: End, z: End) -> Fraction:
    """``v(c(w,x:y,z))`` with ``c = (w-y)(x-z)/((w-z)(x-y))``."""
    ends = [w, x, y, z]
    if sum(1 for e in ends if e.kind == "infinity") > 1 or len({e.key() for e in ends}) < 4:
        raise ValueError("cross ratio needs four distinct ends")
    total = Fraction(0)
    for a, b, sgn in ((w, y, 1), (x, z, 1), (w, z, -1), (x, y, -1)):
        v = _factor_valuation(a, b)
        if v is not None:
            total += sgn * v
    return total


def cross_ratio_length(w: End, x: End, y: End, z: End) -> Fraction:
    """Length of ``[w,x] cap [y,z]`` in the tree."""
    return abs(cross_ratio_valuation(w, x, y, z))


# -- divisors ---------------------------------------------------------------


def _unit_one(horizon) -> PuiseuxSeries:
    return PuiseuxSeries.constant(1, horizon)


def _fmt_q(e: Fraction) -> str:
    return "q^" + (str(e) if e.denominator == 1 else f"({e})")


def _orbit(sign_unit: tuple[int, PuiseuxSeries], exponent: Fraction, name: str, window) -> list[End]:
    lo, hi = window
    out = []
    e = exponent
    while e >= lo:
        e -= 4
    while e < hi:
        if e >= lo:
            for sg in (1, -1):
                lab = ("-" if sg < 0 else "") + (f"{name}*" if name else "") + _fmt_q(e)
                out.append(End(sg, sign_unit[1], e, "finite", lab))
        e += 4
    return out


def zero_divisor(horizon=24, window=WINDOW) -> list[End]:
    """Zeros of ``xx`` and ``yy`` lifted along the deck action, exponents in ``window``."""
    one = _unit_one(horizon)
    reps = {}
    for e in (Fraction(1, 2), Fraction(-1, 2)):
        for shift in (0, 1):
            for z in _orbit((1, one), e + shift, "", window):
                reps.setdefault(z.key(), z)
    return sorted(reps.values(), key=lambda z: (z.exponent, -z.sign))


def zero_representatives(horizon=24) -> dict[str, list[End]]:
    """Representatives modulo ``+-q^4``: the zeros of ``yy`` and of ``xx = yy(t/q)``."""
    one = _unit_one(horizon)
    zy = [End(sg, one, Fraction(e), "finite", ("-" if sg < 0 else "") + _fmt_q(Fraction(e)))
          for e in (Fraction(1, 2), Fraction(-1, 2)) for sg in (1, -1)]
    zx = [z.scaled(1) for z in zy]
    for z in zx:
        object.__setattr__(z, "label", ("-" if z.sign < 0 else "") + _fmt_q(z.exponent))
    return {"Z_y": zy, "Z_x": zx}


# -- the pole factor fit ----------------------------------------------------


@dataclass(frozen=True)
class ThetaFactor:
    xi: PuiseuxSeries
    offset_a: Fraction

    def product(self, horizon, t_degree_bound: int | None = None) -> BivariateSeries:
        """``prod (1 + xi q^(8n+a) t^2) * prod (1 + xi^-1 q^(-8n-a) t^-2)`` below ``horizon``."""
        horizon = Fraction(horizon)
        xi = self.xi.truncate(horizon)
        xinv = xi.inverse()
        acc = BivariateSeries.from_terms({(0, 0): 1}, horizon)
        m = self.offset_a
        while m < horizon:
            if m > 0:
                acc = acc * _one_plus(xi, m, 2, horizon)
            m += 8
        m = 8 - self.offset_a
        while m < horizon:
            if m > 0:
                acc = acc * _one_plus(xinv, m, -2, horizon)
            m += 8
        return acc

    def to_json(self) -> dict:
        return {"xi": self.xi.to_json(), "offset_a": rat(self.offset_a)}


def _one_plus(c: PuiseuxSeries, shift: Fraction, degree: int, horizon) -> BivariateSeries:
    terms = {(0, 0): Fraction(1)}
    for e, v in c.terms.items():
        terms[(e + shift, degree)] = v
    return BivariateSeries.from_terms(terms, min(Fraction(horizon), c.horizon + shift))


def delta_series(params, q_horizon=None, t_degree_bound: int = 10) -> BivariateSeries:
    """``-s * theta_3 + r * theta_4``."""
    for v in ((params.r + params.s).valuation(), (params.r - params.s).valuation()):
        if not v.known:
            raise InsufficientPrecision("r + s or r - s vanishes at this truncation")
    h = params.horizon if q_horizon is None else Fraction(q_horizon)
    return theta_bar(3, h, t_degree_bound) * (-params.s) + theta_bar(4, h, t_degree_bound) * params.r


def delta_at_t_squared(params, T: PuiseuxSeries, horizon) -> PuiseuxSeries:
    """``Delta`` as a function of ``T = t^2``: ``sum (r - (-1)^n s) q^(2n^2) T^n``."""
    horizon = Fraction(horizon)
    vt = T.valuation()
    if not vt.known:
        raise InsufficientPrecision("T has unknown valuation")
    total = PuiseuxSeries.zero(horizon)
    inv = T.inverse()
    n_max = 2
    while 2 * n_max * n_max - n_max * abs(vt.value) < horizon + 2:
        n_max += 1
    for n in range(-n_max, n_max + 1):
        if 2 * n * n + n * vt.value >= horizon:
            continue
        coef = params.r - params.s if n % 2 == 0 else params.r + params.s
        power = T**n if n >= 0 else inv ** (-n)
        total = total + coef * power.shift(2 * n * n)
    return total.truncate(horizon)


@dataclass(frozen=True)
class PoleFit:
    xi: ThetaFactor
    eta: ThetaFactor
    constant: PuiseuxSeries
    horizon: Fraction
    log_derivative: BivariateSeries

    def to_json(self) -> dict:
        return {
            "a": rat(self.xi.offset_a),
            "xi": self.xi.xi.to_json(),
            "b": rat(self.eta.offset_a),
            "eta": self.eta.xi.to_json(),
            "constant": self.constant.to_json(),
            "horizon": rat(self.horizon),
        }


def fit_pole_factors(delta: BivariateSeries, offsets=None, order: int = 8, verify: bool = True) -> PoleFit:
    """Solve ``d/dt log Delta = d/dt log(Theta_{xi,a} Theta_{eta,b})``.

    Only the ``t^1`` and ``t^-3`` coefficients of the logarithmic derivative
    are needed: they equal ``2(xi q^a + eta q^b)/(1-q^8)`` and
    ``-2(xi^-1 q^(8-a) + eta^-1 q^(8-b))/(1-q^8)``.  All remaining degrees are
    then checked against the fitted product.
    """
    L = delta.log_derivative_t()
    H = L.horizon
    t1, t3 = L.t_coefficient(1), L.t_coefficient(-3)
    v1, v3 = t1.valuation(), t3.valuation()
    if not (v1.known and v3.known):
        raise UnderdeterminedFit("leading pole terms not visible at this truncation")
    a_det, b_det = v1.value, 8 - v3.value
    if offsets is not None and offsets != "auto":
        a, b = (Fraction(o) for o in offsets)
        if (a, b) != (a_det, b_det):
            raise OffsetMismatch(f"requested offsets {(a, b)} but the leading terms give {(a_det, b_det)}")
    a, b = a_det, b_det
    if a == b:
        raise UnderdeterminedFit("confluent offsets: the two factors cannot be separated")
    if not (0 < a < b < 8):
        raise OffsetMismatch(f"leading terms give offsets a={a}, b={b}, not a two-factor pattern")
    gq = PuiseuxSeries({0: 1, 8: -1}, H)
    A = t1 * gq / 2
    B = -t3 * gq / 2
    if H - a < order or H - (8 - b) < order:
        raise UnderdeterminedFit(
            f"log-derivative known below q^{H}; {order} coefficients need horizon >= {max(a, 8 - b) + order}"
        )
    xi = A.shift(-a)
    eta_inv = B.shift(b - 8)
    for _ in range(int(H) * 2 + 4):
        new_xi = (A - eta_inv.inverse().shift(b)).shift(-a)
        new_eta_inv = (B - new_xi.inverse().shift(8 - a)).shift(b - 8)
        if new_xi == xi and new_eta_inv == eta_inv:
            break
        xi, eta_inv = new_xi, new_eta_inv
    else:
        raise UnderdeterminedFit("fixed-point iteration for the pole factors did not settle")
    eta = eta_inv.inverse()
    fa, fb = ThetaFactor(xi, a), ThetaFactor(eta, b)
    fit_h = min(H, xi.horizon + a, eta.horizon + b)
    const = PuiseuxSeries.zero(fit_h)
    if verify:
        prod = fa.product(fit_h) * fb.product(fit_h)
        diff = L - prod.log_derivative_t()
        bad = [e for (e, _d), c in diff.terms.items() if e < fit_h]
        if bad:
            raise DisagreementBug(f"fitted factors leave a log-derivative residual at q^{min(bad)}")
        const = delta.t_coefficient(0) / prod.t_coefficient(0)
        resid = delta - prod * const
        bad = [e for (e, _d), c in resid.terms.items() if e < min(fit_h, resid.horizon)]
        if bad:
            raise DisagreementBug(f"Delta - c*Theta*Theta is nonzero at q^{min(bad)}")
    return PoleFit(fa, fb, const, fit_h, L)


def pole_divisor(fit: PoleFit, window=WINDOW) -> list[End]:
    """Poles of ``yy`` (``+-sqrt(-xi^-1) q^(-a/2+4n)``) and of ``xx`` (shifted by ``q``)."""
    out = {}
    for name, fac in (("xibar", fit.xi), ("etabar", fit.eta)):
        w = -fac.xi.inverse()
        for shift in (0, 1):
            for z in _orbit((1, w), -fac.offset_a / 2 + shift, name, window):
                out.setdefault(z.key(), z)
    return sorted(out.values(), key=lambda z: (z.exponent, z.label))


def bar_units(fit: PoleFit) -> dict[str, PuiseuxSeries | None]:
    """``sqrt(-xi^-1)`` and ``sqrt(-eta^-1)`` when they have rational principal coefficients."""
    out = {}
    for name, fac in (("xibar", fit.xi), ("etabar", fit.eta)):
        try:
            out[name] = (-fac.xi.inverse()).sqrt()
        except NotASquare:
            out[name] = None
    return out


# -- metric graphs ----------------------------------------------------------


@dataclass
class MetricGraph:
    nodes: list[str]
    edges: list[tuple[str, str, Fraction]]
    ends: list[tuple[str, str]]
    cycle_len: Fraction | None = None
    attachments: dict = field(default_factory=dict, repr=False)

    def betti_number(self) -> int:
        parent = {n: n for n in self.nodes}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        cycles = 0
        for a, b, _ in self.edges:
            ra, rb = find(a), find(b)
            if ra == rb:
                cycles += 1
            else:
                parent[ra] = rb
        return cycles

    def is_connected(self) -> bool:
        if not self.nodes:
            return True
        adj = {n: set() for n in self.nodes}
        for a, b, _ in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        seen = {self.nodes[0]}
        stack = [self.nodes[0]]
        while stack:
            for m in adj[stack.pop()]:
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        return len(seen) == len(self.nodes)

    def path_edges(self, a: str, b: str) -> set[int]:
        """Edge indices on the unique path between two nodes of a tree."""
        adj: dict[str, list[tuple[str, int]]] = {n: [] for n in self.nodes}
        for k, (x, y, _) in enumerate(self.edges):
            adj[x].append((y, k))
            adj[y].append((x, k))
        prev = {a: None}
        stack = [a]
        while stack:
            n = stack.pop()
            for m, k in adj[n]:
                if m not in prev:
                    prev[m] = (n, k)
                    stack.append(m)
        out = set()
        n = b
        while prev[n] is not None:
            n, k = prev[n]
            out.add(k)
        return out

    def end_node(self, label: str) -> str:
        for node, lab in self.ends:
            if lab == label:
                return node
        raise KeyError(label)

    def shared_length(self, w: str, x: str, y: str, z: str) -> Fraction:
        """Length of ``[w,x] cap [y,z]`` for end labels."""
        p1 = self.path_edges(self.end_node(w), self.end_node(x))
        p2 = self.path_edges(self.end_node(y), self.end_node(z))
        return sum((self.edges[k][2] for k in p1 & p2), Fraction(0))

    def to_json(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "edges": [{"a": a, "b": b, "len": rat(l)} for a, b, l in self.edges],
            "ends": [{"at": n, "label": lab} for n, lab in self.ends],
            "cycle_len": None if self.cycle_len is None else rat(self.cycle_len),
        }


def _cluster(ends: list[End], level: Fraction, node: str, graph: MetricGraph, counter) -> str:
    """Attach ``ends`` (all within ``v >= level`` of each other) below ``node``; return a signature."""
    classes: list[list[End]] = []
    for z in ends:
        for cls_ in classes:
            if diff_valuation(z, cls_[0]) > level:
                cls_.append(z)
                break
        else:
            classes.append([z])
    sigs = []
    for cls_ in classes:
        if len(cls_) == 1:
            graph.ends.append((node, cls_[0].label))
            sigs.append("e")
            continue
        nxt = min(diff_valuation(x, y) for x, y in itertools.combinations(cls_, 2))
        child = f"b{next(counter)}"
        graph.nodes.append(child)
        graph.edges.append((node, child, nxt - level))
        sigs.append(f"{nxt - level}:{_cluster(cls_, nxt, child, graph, counter)}")
    return "(" + ",".join(sorted(sigs)) + ")"


def build_tree(ends: Iterable[End]) -> MetricGraph:
    """Spanning tree of ``ends`` together with ``0`` and ``oo``."""
    finite = [z for z in ends if z.finite]
    keys = [z.key() for z in finite]
    if len(set(keys)) != len(keys):
        raise ValueError("repeated ends")
    heights = sorted({z.exponent for z in finite})
    graph = MetricGraph([], [], [])
    counter = itertools.count()
    central = {}
    for h in heights:
        central[h] = f"c{h}"
        graph.nodes.append(central[h])
    for lo, hi in zip(heights, heights[1:]):
        graph.edges.append((central[lo], central[hi], hi - lo))
    if heights:
        graph.ends.append((central[heights[-1]], "0"))
        graph.ends.append((central[heights[0]], "oo"))
    for h in heights:
        graph.attachments[h] = _cluster([z for z in finite if z.exponent == h], h, central[h], graph, counter)
    return graph


def verify_tree_metric(graph: MetricGraph, ends: list[End], cap: int = 200) -> list[tuple]:
    """Compare shared path lengths with cross-ratio valuations; return discrepancies."""
    allends = [End.zero(), End.infinity()] + [z for z in ends if z.finite]
    bad = []
    for k, quad in enumerate(itertools.combinations(allends, 4)):
        if k >= cap:
            break
        w, x, y, z = quad
        for (p, s), (u, v) in (((w, x), (y, z)), ((w, y), (x, z)), ((w, z), (x, y))):
            expect = cross_ratio_length(p, s, u, v)
            got = graph.shared_length(p.label, s.label, u.label, v.label)
            if expect != got:
                bad.append((p.label, s.label, u.label, v.label, expect, got))
    return bad


def square_ends(ends: Iterable[End]) -> list[End]:
    out = {}
    for z in ends:
        if z.finite:
            s = z.square()
            out.setdefault(s.key(), s)
    return sorted(out.values(), key=lambda z: (z.exponent, z.label))


def square_quotient(tree: MetricGraph, ends: list[End]) -> MetricGraph:
    """Tree of the squared ends; the central road doubles and branch lengths are kept."""
    finite = [z for z in ends if z.finite]
    keys = {z.key() for z in finite}
    for z in finite:
        if z.negated().key() not in keys:
            raise ValueError("end set is not stable under z -> -z")
    sq = build_tree(square_ends(finite))
    for x, y in itertools.combinations(finite, 2):
        if x.exponent != y.exponent or x.negated().key() == y.key():
            continue
        vx = diff_valuation(x, y)
        vs = diff_valuation(x.square(), y.square())
        vplus = diff_valuation(x, y.negated())
        if vs - 2 * x.exponent != max(vx, vplus) - x.exponent:
            raise DisagreementBug(f"branch length changed under squaring for {x.label}, {y.label}")
    return sq


def mod_q8_quotient(tree: MetricGraph, period=PERIOD) -> MetricGraph:
    """Wrap the central road of a squared tree into a cycle of circumference ``period``."""
    heights = sorted(tree.attachments)
    if not heights or heights[-1] - heights[0] < period - min(
        (b - a for a, b in zip(heights, heights[1:])), default=period
    ):
        raise IncompleteFundamentalDomain("ends do not cover a full period")
    by_res: dict[Fraction, str] = {}
    for h in heights:
        res = h % period
        sig = tree.attachments[h]
        if res in by_res and by_res[res] != sig:
            raise IncompleteFundamentalDomain(f"subtrees at heights congruent to {res} differ")
        by_res[res] = sig
    # every residue must occur in the first full period after the lowest height
    first = heights[0]
    covered = {h % period for h in heights if h < first + period}
    if covered != set(by_res):
        raise IncompleteFundamentalDomain("window does not contain a full period of ends")
    residues = sorted(by_res)
    graph = MetricGraph([f"r{r}" for r in residues], [], [], Fraction(period))
    for k, r in enumerate(residues):
        nxt = residues[(k + 1) % len(residues)]
        gap = (nxt - r) % period or Fraction(period)
        graph.edges.append((f"r{r}", f"r{nxt}", gap))
        graph.attachments[r] = by_res[r]
        _expand_signature(by_res[r], f"r{r}", graph)
    return graph


def _split_top(sig: str) -> list[str]:
    inner = sig[1:-1]
    parts, depth, cur = [], 0, ""
    for ch in inner:
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    if cur:
        parts.append(cur)
    return parts


def _expand_signature(sig: str, node: str, graph: MetricGraph) -> None:
    for k, part in enumerate(_split_top(sig)):
        if part == "e":
            graph.ends.append((node, f"{node}.e{k}"))
            continue
        length, sub = part.split(":", 1)
        child = f"{node}.{k}"
        graph.nodes.append(child)
        graph.edges.append((node, child, Fraction(length)))
        _expand_signature(sub, child, graph)


# -- isometry with the tropical curve ---------------------------------------


def _canonical_cycle(items: list[tuple[Fraction, str]]) -> tuple:
    """Min over rotations and reflections of ``[(sig, gap_to_next), ...]``."""
    n = len(items)
    sigs = [s for _, s in items]
    gaps = [g for g, _ in items]
    forms = []
    for k in range(n):
        forms.append(tuple((sigs[(k + j) % n], gaps[(k + j) % n]) for j in range(n)))
        rs = [sigs[(k - j) % n] for j in range(n)]
        rg = [gaps[(k - j - 1) % n] for j in range(n)]
        forms.append(tuple(zip(rs, rg)))
    return min(forms)


def graph_canonical_form(graph: MetricGraph) -> tuple:
    residues = sorted(graph.attachments)
    items = []
    for k, r in enumerate(residues):
        nxt = residues[(k + 1) % len(residues)]
        gap = (nxt - r) % graph.cycle_len or graph.cycle_len
        items.append((gap, graph.attachments[r]))
    return _canonical_cycle(items)


def curve_canonical_form(curve) -> tuple:
    from .tropcurve import cycle_vertices, lattice_length

    loop = cycle_vertices(curve)
    on_cycle = set(loop)
    adj: dict[int, list[tuple[int, Fraction]]] = {k: [] for k in range(len(curve.vertices))}
    for e in curve.edges:
        a, b = curve.vertices[e.start], curve.vertices[e.end]
        ln = lattice_length((b[0] - a[0], b[1] - a[1]))
        adj[e.start].append((e.end, ln))
        adj[e.end].append((e.start, ln))
    rays: dict[int, int] = {}
    for r in curve.rays:
        rays[r.at] = rays.get(r.at, 0) + r.weight

    def sig(v: int, parent: int | None) -> str:
        parts = ["e"] * rays.get(v, 0)
        for w, ln in adj[v]:
            if w == parent or w in on_cycle:
                continue
            parts.append(f"{ln}:{sig(w, v)}")
        return "(" + ",".join(sorted(parts)) + ")"

    items = []
    for k, v in enumerate(loop):
        w = loop[(k + 1) % len(loop)]
        a, b = curve.vertices[v], curve.vertices[w]
        gap = lattice_length((b[0] - a[0], b[1] - a[1]))
        parts = ["e"] * rays.get(v, 0)
        for u, ln in adj[v]:
            if u not in on_cycle:
                parts.append(f"{ln}:{sig(u, v)}")
        items.append((gap, "(" + ",".join(sorted(parts)) + ")"))
    return _canonical_cycle(items)


def _fmt_form(form: tuple) -> list:
    return [[s, rat(g)] for s, g in form]


def compare_isometry(graph: MetricGraph, curve) -> dict:
    from .tropcurve import subdivision_smoothness

    if curve.subdivision is None or not subdivision_smoothness(curve.subdivision):
        raise NotSmooth("isometry is only asserted for smooth tropical curves")
    g = graph_canonical_form(graph)
    c = curve_canonical_form(curve)
    report = {"isometric": g == c, "graph_form": _fmt_form(g), "curve_form": _fmt_form(c)}
    if g != c:
        if len(g) != len(c):
            report["first_discrepancy"] = f"{len(g)} attachment points vs {len(c)} cycle vertices"
        else:
            k = next(i for i in range(len(g)) if g[i] != c[i])
            report["first_discrepancy"] = f"position {k}: {g[k]} vs {c[k]}"
    return report


# -- full pipeline ----------------------------------------------------------


@dataclass
class BTReport:
    fit: PoleFit
    zeros: list[End]
    poles: list[End]
    tree: MetricGraph
    squared: MetricGraph
    quotient: MetricGraph
    isometry: dict
    bars: dict
    cross_ratios: list

    def to_json(self) -> dict:
        return {
            "fit": self.fit.to_json(),
            "bars": {k: (None if v is None else v.to_json()) for k, v in self.bars.items()},
            "zeros": [z.label for z in self.zeros],
            "poles": [z.label for z in self.poles],
            "cross_ratios": [
                {"ends": list(labels), "length": rat(length)} for labels, length in self.cross_ratios
            ],
            "tree": self.tree.to_json(),
            "squared_tree": self.squared.to_json(),
            "quotient": self.quotient.to_json(),
            "isometry": self.isometry,
        }


def example_cross_ratios(ends: list[End]) -> list:
    """``[0, w] cap [y, oo]`` and ``[w, x] cap [y, oo]`` with ``w`` the lowest positive xibar
    pole, ``y`` an etabar pole and ``x`` the xibar pole at the height of ``y``."""
    zero, inf = End.zero(), End.infinity()
    xis = [z for z in ends if z.finite and z.sign > 0 and z.label.startswith("xibar")]
    etas = [z for z in ends if z.finite and z.sign > 0 and z.label.startswith("etabar")]
    if not xis or not etas:
        return []
    w = min(xis, key=lambda z: z.exponent)
    out = []
    for y in sorted(etas, key=lambda z: z.exponent):
        if y.exponent <= w.exponent:
            continue
        out.append(((zero.label, w.label, y.label, inf.label), cross_ratio_length(zero, w, y, inf)))
        same = [x for x in xis if x.exponent == y.exponent]
        if same:
            x = same[0]
            out.append(((w.label, x.label, y.label, inf.label), cross_ratio_length(w, x, y, inf)))
            break
    return out


def bt_pipeline(params, curve, fit_order: int = 8, horizon=None) -> BTReport:
    from .tropcurve import subdivision_smoothness

    if curve.subdivision is None or not subdivision_smoothness(curve.subdivision):
        raise NotSmooth("the tree quotient is compared only for smooth tropical curves")
    h = params.horizon if horizon is None else Fraction(horizon)
    delta = delta_series(params, h)
    fit = fit_pole_factors(delta, order=fit_order)
    zeros = zero_divisor(h)
    poles = pole_divisor(fit)
    ends = zeros + poles
    tree = build_tree(ends)
    bad = verify_tree_metric(tree, ends)
    if bad:
        raise DisagreementBug(f"tree metric disagrees with cross ratios: {bad[0]}")
    squared = square_quotient(tree, ends)
    quotient = mod_q8_quotient(squared)
    iso = compare_isometry(quotient, curve)
    return BTReport(fit, zeros, poles, tree, squared, quotient, iso, bar_units(fit), example_cross_ratios(ends))
