"""Ultradiscrete theta functions and the piecewise-linear cycle parametrization.

With ``Theta_odd`` and ``Theta_even`` the period-2 parabolic bumps below,
``Y(u) = max(To, Te - 1) - max(Te - v(r-s), To - v(r+s))`` and
``X(u) = Y(u - 1/2)``; the cycle is traced by ``(-X(u), -Y(u))``.  Between
breakpoints every branch difference is linear in ``u``, so the locus is a
polygon whose corners are recovered exactly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .errors import ExceptionalParameter
from .serialize import rat
from .tropcurve import corner_points, lattice_length, primitive

HALF = Fraction(1, 2)
DEFAULT_STEP = Fraction(1, 16)


def theta_odd(u) -> Fraction:
    u = Fraction(u)
    return -2 * (2 * math.floor(u / 2) + 1 - u) ** 2


def theta_even(u) -> Fraction:
    u = Fraction(u)
    return -2 * (2 * math.floor((u + 1) / 2) - u) ** 2


@dataclass(frozen=True)
class CycleParam:
    v_plus: Fraction
    v_minus: Fraction
    params: object = field(default=None, compare=False)

    @classmethod
    def from_params(cls, params) -> "CycleParam":
        return cls(params.v_plus(), params.v_minus(), params)

    @property
    def delta(self) -> Fraction:
        return self.v_plus - self.v_minus


def _y(cp: CycleParam, u: Fraction) -> Fraction:
    to, te = theta_odd(u), theta_even(u)
    return max(to, te - 1) - max(te - cp.v_minus, to - cp.v_plus)


def cycle_point(cp: CycleParam, u) -> tuple[Fraction, Fraction]:
    """``(-X(u), -Y(u))``."""
    u = Fraction(u)
    return (-_y(cp, u - HALF), -_y(cp, u))


def in_exceptional_set(cp: CycleParam, u) -> bool:
    """Integers, or parameters where both the numerator and the denominator tie."""
    u = Fraction(u)
    if u.denominator == 1:
        return True
    to, te = theta_odd(u), theta_even(u)
    return 1 - te == -to and cp.v_minus - te == cp.v_plus - to


def on_tie_locus(cp: CycleParam, u) -> bool:
    """Integers or parameters where either max-expression has two active branches."""
    u = Fraction(u)
    if u.denominator == 1:
        return True
    to, te = theta_odd(u), theta_even(u)
    return 1 - te == -to or cp.v_minus - te == cp.v_plus - to


def point_valuations(cp: CycleParam, u) -> tuple[Fraction, Fraction]:
    """``(v(xx(t)), v(yy(t)))`` for ``v(t) = 2u`` off the exceptional set."""
    u = Fraction(u)
    for w in (u, u - HALF):
        if in_exceptional_set(cp, w):
            raise ExceptionalParameter(f"u={w} lies in the exceptional set")

    def vy(w):
        to, te = theta_odd(w), theta_even(w)
        return min(1 - te, -to) - min(cp.v_minus - te, cp.v_plus - to)

    return vy(u - HALF), vy(u)


class Prediction(NamedTuple):
    kind: str
    length: Fraction
    segments: int = 0


def delta_shape(delta) -> Prediction:
    delta = Fraction(delta)
    if delta >= 2:
        return Prediction("Pentagon", Fraction(8))
    if delta > 1:
        return Prediction("Heptagon", Fraction(8))
    if delta > -1:
        return Prediction("Square", 4 * (delta + 1))
    return Prediction("Degenerate", min(Fraction(1), -delta - 1), 2)


# -- breakpoints and sampling -----------------------------------------------


def breakpoints(cp: CycleParam, lo=0, hi=2) -> list[Fraction]:
    """All parameters in ``[lo, hi)`` where ``(-X, -Y)`` can change direction."""
    lo, hi = Fraction(lo), Fraction(hi)
    out = set()
    for shift in (Fraction(0), HALF):
        for k in range(math.floor(lo) - 2, math.ceil(hi) + 2):
            # To - Te is linear on [k, k+1]; solve for the two tie values
            a = Fraction(k)
            d0 = theta_odd(a + Fraction(1, 3)) - theta_even(a + Fraction(1, 3))
            d1 = theta_odd(a + Fraction(2, 3)) - theta_even(a + Fraction(2, 3))
            slope = (d1 - d0) * 3
            cands = [a]
            if slope:
                for target in (Fraction(-1), cp.delta):
                    w = a + Fraction(1, 3) + (target - d0) / slope
                    if a < w < a + 1:
                        cands.append(w)
            for w in cands:
                p = w + shift
                if lo <= p < hi:
                    out.add(p)
    return sorted(out)


def exact_polygon(cp: CycleParam) -> list[tuple[Fraction, Fraction]]:
    """Corner points of the locus over one period, from exact breakpoints."""
    pts = []
    for b in breakpoints(cp):
        p = cycle_point(cp, b)
        if not pts or pts[-1] != p:
            pts.append(p)
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    return _simplify_closed(pts)


def _simplify_closed(pts: list) -> list:
    changed = True
    while changed and len(pts) > 2:
        changed = False
        dedup = [p for k, p in enumerate(pts) if p != pts[k - 1]]
        if len(dedup) != len(pts):
            pts, changed = dedup, True
            continue
        kept = corner_points(pts)
        turns = _turnarounds(pts)
        keep = [p for k, p in enumerate(pts) if p in kept or k in turns]
        if len(keep) != len(pts):
            pts, changed = keep, True
    return pts


def _turnarounds(pts: list) -> set[int]:
    out = set()
    n = len(pts)
    for k in range(n):
        a, b, c = pts[k - 1], pts[k], pts[(k + 1) % n]
        u = (b[0] - a[0], b[1] - a[1])
        v = (c[0] - b[0], c[1] - b[1])
        if u[0] * v[1] - u[1] * v[0] == 0 and u[0] * v[0] + u[1] * v[1] < 0:
            out.add(k)
    return out


def grid(step, offset=None, lo=0, hi=4) -> list[Fraction]:
    step = Fraction(step)
    if step <= 0 or step.numerator != 1:
        raise ValueError("step must be 1/N for a positive integer N")
    offset = step / 2 if offset is None else Fraction(offset)
    n = int((Fraction(hi) - lo) / step)
    return [Fraction(lo) + offset + step * k for k in range(n)]


def choose_offset(cp: CycleParam, step, offset=None) -> Fraction:
    """Half-step offset unless it meets a tie; then halve until the grid is clean."""
    step = Fraction(step)
    off = step / 2 if offset is None else Fraction(offset)
    first = off
    for _ in range(32):
        if not any(on_tie_locus(cp, u) or on_tie_locus(cp, u - HALF) for u in grid(step, off, 0, 2)):
            if off != first:
                warnings.warn(f"grid offset {first} meets a tie parameter; using offset {off}", stacklevel=3)
            return off
        off = off / 2
    raise ExceptionalParameter("could not find a grid offset avoiding the tie parameters")


def _local_direction(cp: CycleParam, u: Fraction, h: Fraction) -> tuple[int, int]:
    p0 = cycle_point(cp, u - h)
    p1 = cycle_point(cp, u + h)
    d = (p1[0] - p0[0], p1[1] - p0[1])
    return (0, 0) if d == (0, 0) else primitive(d)


def _intersect(p, d, q, e):
    det = d[0] * e[1] - d[1] * e[0]
    if det == 0:
        return None
    t = ((q[0] - p[0]) * e[1] - (q[1] - p[1]) * e[0]) / Fraction(det)
    return (p[0] + t * d[0], p[1] + t * d[1])


def reconstruct_polygon(cp: CycleParam, samples: list[Fraction], step: Fraction) -> list:
    """Corners from direction changes between consecutive samples of one period."""
    if not samples:
        return []
    pts = [cycle_point(cp, u) for u in samples]
    # every sample sits strictly inside a linear piece: probe well within the half-step
    h = step / 64
    dirs = [_local_direction(cp, u, h) for u in samples]
    corners = []
    n = len(samples)
    for k in range(n):
        j = (k + 1) % n
        if dirs[k] == dirs[j]:
            continue
        c = None
        if dirs[k] != (0, 0) and dirs[j] != (0, 0):
            c = _intersect(pts[k], dirs[k], pts[j], dirs[j])
        elif dirs[k] == (0, 0):
            c = pts[k]
        else:
            c = pts[j]
        if c is None:
            # antiparallel pieces: the turning point is an exact breakpoint in between
            u0, u1 = samples[k], samples[j] + (2 if j == 0 else 0)
            bps = [b for b in breakpoints(cp, u0, u1 + 1) if u0 < b < u1]
            c = max((cycle_point(cp, b) for b in bps), key=lambda p: abs(p[0] - pts[k][0]) + abs(p[1] - pts[k][1]))
        corners.append(c)
    return _simplify_closed(corners)


def polygon_length(poly: list) -> Fraction:
    return sum(
        (lattice_length((poly[(k + 1) % len(poly)][0] - p[0], poly[(k + 1) % len(poly)][1] - p[1]))
         for k, p in enumerate(poly)),
        Fraction(0),
    )


def locus_segments(poly: list) -> list[tuple[tuple, tuple]]:
    """Maximal segments of a zero-area closed path, each listed once."""
    segs = set()
    n = len(poly)
    for k in range(n):
        a, b = poly[k], poly[(k + 1) % n]
        if a != b:
            segs.add(tuple(sorted((a, b))))
    return sorted(segs)


@dataclass
class CycleSample:
    delta: Fraction
    predicted: Prediction
    samples: list
    points: list
    polygon: list
    kind: str
    length: Fraction
    segments: list
    on_curve: bool | None
    step: Fraction
    offset: Fraction

    def to_json(self) -> dict:
        out = {
            "delta": rat(self.delta),
            "predicted": {"kind": self.predicted.kind, "length": rat(self.predicted.length)},
            "samples": [[rat(x), rat(y)] for x, y in self.points],
            "reconstructed_polygon": [[rat(x), rat(y)] for x, y in self.polygon],
            "measured": {"kind": self.kind, "length": rat(self.length)},
            "on_curve": self.on_curve,
            "step": rat(self.step),
            "offset": rat(self.offset),
        }
        if self.segments:
            out["segments"] = [[[rat(x), rat(y)] for x, y in s] for s in self.segments]
        return out


def sample_cycle(cp: CycleParam, step=DEFAULT_STEP, offset=None, curve=None) -> CycleSample:
    """Sample ``u`` over ``[0, 4)``, reconstruct the polygon, and test curve membership."""
    step = Fraction(step)
    off = choose_offset(cp, step, offset)
    us = grid(step, off, 0, 4)
    points = [cycle_point(cp, u) for u in us]
    period = [u for u in us if u < 2]
    for u in period:
        if cycle_point(cp, u + 2) != cycle_point(cp, u):
            raise AssertionError("locus is not 2-periodic")
    poly = reconstruct_polygon(cp, period, step)
    pred = delta_shape(cp.delta)
    segments = []
    if pred.kind == "Degenerate":
        segments = locus_segments(poly)
        kind = "Degenerate"
        length = min((lattice_length((b[0] - a[0], b[1] - a[1])) for a, b in segments), default=Fraction(0))
    else:
        from .tropcurve import POLYGON_KINDS

        kind = POLYGON_KINDS.get(len(poly), f"{len(poly)}-gon")
        length = polygon_length(poly)
    on_curve = None
    if curve is not None:
        on_curve = all(curve.contains(x, y) for x, y in points)
    return CycleSample(cp.delta, pred, us, points, poly, kind, length, segments, on_curve, step, off)
