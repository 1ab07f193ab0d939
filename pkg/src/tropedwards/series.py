"""Truncated Puiseux series over the rationals.

A :class:`PuiseuxSeries` stores the exact coefficients of every exponent
below its *horizon*; everything at or above the horizon is unknown.  All
arithmetic propagates horizons so that a result never claims more
precision than its inputs carry.  Exponents live in ``(1/ram) * Z`` and are
stored internally as integers in units of ``1/ram``.

:class:`BivariateSeries` adds a Laurent-polynomial variable ``t`` on top of
the same q-expansion discipline; it houses the reduced theta series and the
pole-factor fitting machinery of :mod:`tropedwards.bttree`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import InsufficientPrecision, NotASquare

DEFAULT_HORIZON = Fraction(24)
DEFAULT_T_DEGREE_BOUND = 10


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _rational_sqrt(c: Fraction) -> Fraction | None:
    if c <= 0:
        return None
    n, d = math.isqrt(c.numerator), math.isqrt(c.denominator)
    if n * n == c.numerator and d * d == c.denominator:
        return Fraction(n, d)
    return None


@dataclass(frozen=True)
class Valuation:
    """Either a known valuation or a lower bound coming from the horizon."""

    value: Fraction
    known: bool

    @classmethod
    def exact(cls, v) -> "Valuation":
        return cls(_frac(v), True)

    @classmethod
    def at_least(cls, b) -> "Valuation":
        return cls(_frac(b), False)

    def __str__(self) -> str:
        return str(self.value) if self.known else f">={self.value}"


Known = Valuation.exact
AtLeast = Valuation.at_least


class PuiseuxSeries:
    """Immutable truncated series ``sum c_e q^e`` with ``e < horizon``."""

    __slots__ = ("ram", "_c", "_hk")

    def __init__(self, terms: Mapping | Iterable = (), horizon=DEFAULT_HORIZON, ram: int | None = None):
        items = list(terms.items()) if isinstance(terms, Mapping) else list(terms)
        horizon = _frac(horizon)
        exps = [_frac(e) for e, _ in items]
        n = ram or 1
        for e in exps + [horizon]:
            n = _lcm(n, e.denominator)
        coeffs = {}
        hk = horizon * n
        for e, (_, c) in zip(exps, items):
            k = int(e * n)
            if k < hk:
                coeffs[k] = coeffs.get(k, Fraction(0)) + _frac(c)
        self._init(n, {k: c for k, c in coeffs.items() if c}, int(hk))

    def _init(self, ram: int, coeffs: dict, hk: int) -> None:
        g = ram
        if g > 1:
            g = math.gcd(g, hk)
            for k in coeffs:
                if g == 1:
                    break
                g = math.gcd(g, k)
        if g > 1:
            ram //= g
            hk //= g
            coeffs = {k // g: c for k, c in coeffs.items()}
        object.__setattr__(self, "ram", ram)
        object.__setattr__(self, "_c", coeffs)
        object.__setattr__(self, "_hk", hk)

    @classmethod
    def _raw(cls, ram: int, coeffs: dict, hk: int) -> "PuiseuxSeries":
        obj = cls.__new__(cls)
        obj._init(ram, {k: c for k, c in coeffs.items() if c and k < hk}, hk)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("PuiseuxSeries is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, c, horizon=DEFAULT_HORIZON) -> "PuiseuxSeries":
        return cls({0: c}, horizon)

    @classmethod
    def monomial(cls, c, exponent, horizon=DEFAULT_HORIZON) -> "PuiseuxSeries":
        return cls({exponent: c}, horizon)

    @classmethod
    def zero(cls, horizon=DEFAULT_HORIZON) -> "PuiseuxSeries":
        return cls({}, horizon)

    # -- inspection ---------------------------------------------------

    @property
    def horizon(self) -> Fraction:
        return Fraction(self._hk, self.ram)

    @property
    def terms(self) -> dict[Fraction, Fraction]:
        return {Fraction(k, self.ram): self._c[k] for k in sorted(self._c)}

    def coefficient(self, exponent) -> Fraction:
        e = _frac(exponent)
        if e >= self.horizon:
            raise InsufficientPrecision(f"coefficient of q^{e} beyond horizon {self.horizon}")
        k = e * self.ram
        if k.denominator != 1:
            return Fraction(0)
        return self._c.get(int(k), Fraction(0))

    def valuation(self) -> Valuation:
        if not self._c:
            return AtLeast(self.horizon)
        return Known(Fraction(min(self._c), self.ram))

    def principal_coefficient(self) -> Fraction:
        if not self._c:
            raise InsufficientPrecision("principal coefficient of an all-zero truncation")
        return self._c[min(self._c)]

    def is_zero_truncation(self) -> bool:
        return not self._c

    def _vk(self) -> int:
        """Valuation in 1/ram units, horizon if unknown."""
        return min(self._c) if self._c else self._hk

    def lift(self, ram: int) -> tuple[dict, int]:
        if ram % self.ram:
            raise ValueError("target ramification must be a multiple")
        m = ram // self.ram
        return {k * m: c for k, c in self._c.items()}, self._hk * m

    def truncate(self, horizon) -> "PuiseuxSeries":
        h = min(_frac(horizon), self.horizon)
        return PuiseuxSeries(self.terms, h, self.ram)

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other) -> "PuiseuxSeries | None":
        if isinstance(other, PuiseuxSeries):
            return other
        if isinstance(other, (int, Fraction)):
            # exact scalars carry no truncation of their own
            return PuiseuxSeries._raw(self.ram, {0: _frac(other)}, max(self._hk, 1))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = _lcm(self.ram, o.ram)
        a, ha = self.lift(n)
        b, hb = o.lift(n)
        hk = min(ha, hb)
        out = dict(a)
        for k, c in b.items():
            out[k] = out.get(k, 0) + c
        return PuiseuxSeries._raw(n, out, hk)

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxSeries._raw(self.ram, {k: -c for k, c in self._c.items()}, self._hk)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _frac(other)
            if c == 0:
                return PuiseuxSeries._raw(self.ram, {}, self._hk)
            return PuiseuxSeries._raw(self.ram, {k: v * c for k, v in self._c.items()}, self._hk)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        n = _lcm(self.ram, other.ram)
        a, ha = self.lift(n)
        b, hb = other.lift(n)
        va = min(a) if a else ha
        vb = min(b) if b else hb
        hk = min(va + hb, vb + ha)
        out: dict[int, Fraction] = {}
        bi = sorted(b.items())
        for ka, ca in a.items():
            lim = hk - ka
            for kb, cb in bi:
                if kb >= lim:
                    break
                k = ka + kb
                out[k] = out.get(k, 0) + ca * cb
        return PuiseuxSeries._raw(n, out, hk)

    __rmul__ = __mul__

    def shift(self, exponent) -> "PuiseuxSeries":
        """Multiply by ``q**exponent`` exactly."""
        e = _frac(exponent)
        n = _lcm(self.ram, e.denominator)
        a, ha = self.lift(n)
        s = int(e * n)
        return PuiseuxSeries._raw(n, {k + s: c for k, c in a.items()}, ha + s)

    def inverse(self) -> "PuiseuxSeries":
        if not self._c:
            raise InsufficientPrecision(f"cannot invert O(q^{self.horizon})")
        v = min(self._c)
        rel = self._hk - v
        c0 = self._c[v]
        inv0 = 1 / c0
        a = sorted((k - v, c) for k, c in self._c.items() if k != v)
        b = [Fraction(0)] * rel
        b[0] = inv0
        for m in range(1, rel):
            acc = Fraction(0)
            for i, c in a:
                if i > m:
                    break
                acc += c * b[m - i]
            b[m] = -acc * inv0
        return PuiseuxSeries._raw(self.ram, {m - v: c for m, c in enumerate(b) if c}, rel - v)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / _frac(other))
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        if result is None:
            return PuiseuxSeries._raw(self.ram, {0: Fraction(1)}, max(self._hk - self._vk(), 1))
        return result

    def sqrt(self) -> "PuiseuxSeries":
        """Square root with positive rational principal coefficient."""
        if not self._c:
            raise InsufficientPrecision(f"cannot take sqrt of O(q^{self.horizon})")
        n = self.ram
        a, ha = self._c, self._hk
        v = min(a)
        if v % 2:
            n *= 2
            a, ha = self.lift(n)
            v = min(a)
        c0 = _rational_sqrt(a[v])
        if c0 is None:
            raise NotASquare(f"principal coefficient {a[v]} is not a rational square")
        rel = ha - v
        rest = sorted((k - v, c) for k, c in a.items())
        coeff = dict(rest)
        b = [Fraction(0)] * rel
        b[0] = c0
        for m in range(1, rel):
            acc = coeff.get(m, Fraction(0))
            for i in range(1, m):
                if b[i] and b[m - i]:
                    acc -= b[i] * b[m - i]
            b[m] = acc / (2 * c0)
        half = v // 2
        return PuiseuxSeries._raw(n, {m + half: c for m, c in enumerate(b) if c}, rel + half)

    def twist(self) -> "PuiseuxSeries":
        """Substitute ``q -> -q``; only defined for integral exponents."""
        if self.ram != 1:
            raise ValueError("q -> -q needs integral exponents")
        return PuiseuxSeries._raw(1, {k: (-c if k % 2 else c) for k, c in self._c.items()}, self._hk)

    # -- comparison and display ---------------------------------------

    def __eq__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self.ram == other.ram and self._hk == other._hk and self._c == other._c

    def __hash__(self):
        return hash((self.ram, self._hk, tuple(sorted(self._c.items()))))

    def agrees_with(self, other: "PuiseuxSeries") -> bool:
        """Equal on the common range of known exponents."""
        return (self - other).is_zero_truncation()

    def __repr__(self):
        return f"PuiseuxSeries({format_series(self)!r}, horizon={self.horizon})"

    def __str__(self):
        return format_series(self) + f" + O(q^{_fmt_exp(self.horizon)})"

    def to_json(self) -> dict:
        return {
            "ram": self.ram,
            "horizon": [self.horizon.numerator, self.horizon.denominator],
            "terms": [[c.numerator, c.denominator, e.numerator, e.denominator] for e, c in self.terms.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "PuiseuxSeries":
        h = Fraction(*data["horizon"]) if isinstance(data["horizon"], list) else Fraction(data["horizon"])
        terms = {Fraction(en, ed): Fraction(cn, cd) for cn, cd, en, ed in data["terms"]}
        return cls(terms, h, int(data.get("ram", 1)))


def _fmt_exp(e: Fraction) -> str:
    return str(e.numerator) if e.denominator == 1 else f"({e.numerator}/{e.denominator})"


def format_series(a: PuiseuxSeries) -> str:
    """Render the known terms in the grammar accepted by the CLI parser."""
    parts = []
    for e, c in a.terms.items():
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if e == 0:
            body = str(mag)
        else:
            qpart = "q" if e == 1 else f"q^{_fmt_exp(e)}"
            if mag == 1:
                body = qpart
            elif mag.denominator == 1:
                body = f"{mag}*{qpart}"
            else:
                body = f"({mag})*{qpart}"
        parts.append((sign, body))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def valuation(a: PuiseuxSeries) -> Valuation:
    return a.valuation()


def principal_coefficient(a: PuiseuxSeries) -> Fraction:
    return a.principal_coefficient()


def q(horizon=DEFAULT_HORIZON) -> PuiseuxSeries:
    return PuiseuxSeries.monomial(1, 1, horizon)


# -- the generating series ---------------------------------------------------


def euler_epsilon(horizon=DEFAULT_HORIZON) -> PuiseuxSeries:
    """``prod_{n>=1} (1 + q^n)``: partitions into distinct parts."""
    horizon = _frac(horizon)
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    top = math.ceil(horizon)
    counts = [0] * top
    counts[0] = 1
    for n in range(1, top):
        for k in range(top - 1, n - 1, -1):
            counts[k] += counts[k - n]
    return PuiseuxSeries({k: c for k, c in enumerate(counts)}, horizon)


def epsilon_bar(horizon=DEFAULT_HORIZON) -> PuiseuxSeries:
    """``eps(-q)``."""
    return euler_epsilon(horizon).twist()


# -- bivariate series --------------------------------------------------------


class BivariateSeries:
    """Series in q whose coefficients are Laurent polynomials in ``t``.

    Every term ``q^e t^d`` with ``e < horizon`` is stored, whatever ``d``.
    The optional *cone* ``(slope, offset)`` certifies that every term of the
    untruncated series satisfies ``e >= slope*|d| + offset``; it is what
    makes substituting ``t -> c*t`` with ``v(c) != 0`` sound.
    """

    __slots__ = ("ram", "_c", "_hk", "cone")

    def __init__(self, ram: int, terms: Mapping[int, Mapping[int, Fraction]], hk: int, cone=None):
        clean = {}
        for k, poly in terms.items():
            if k >= hk:
                continue
            p = {d: c for d, c in poly.items() if c}
            if p:
                clean[k] = p
        object.__setattr__(self, "ram", ram)
        object.__setattr__(self, "_c", clean)
        object.__setattr__(self, "_hk", hk)
        object.__setattr__(self, "cone", cone)

    def __setattr__(self, name, value):
        raise AttributeError("BivariateSeries is immutable")

    @classmethod
    def from_terms(cls, terms: Mapping, horizon, cone=None) -> "BivariateSeries":
        """Build from ``{(q_exponent, t_degree): coefficient}``."""
        horizon = _frac(horizon)
        n = horizon.denominator
        for e, _ in terms:
            n = _lcm(n, _frac(e).denominator)
        out: dict[int, dict[int, Fraction]] = {}
        for (e, d), c in terms.items():
            k = int(_frac(e) * n)
            row = out.setdefault(k, {})
            row[d] = row.get(d, 0) + _frac(c)
        return cls(n, out, int(horizon * n), cone)

    @classmethod
    def from_series(cls, a: PuiseuxSeries, degree: int = 0) -> "BivariateSeries":
        return cls(a.ram, {k: {degree: c} for k, c in a._c.items()}, a._hk, None)

    @property
    def horizon(self) -> Fraction:
        return Fraction(self._hk, self.ram)

    @property
    def terms(self) -> dict[tuple[Fraction, int], Fraction]:
        return {
            (Fraction(k, self.ram), d): c
            for k in sorted(self._c)
            for d, c in sorted(self._c[k].items())
        }

    def q_coefficient(self, exponent) -> dict[int, Fraction]:
        """Laurent polynomial (``{degree: coeff}``) multiplying ``q**exponent``."""
        e = _frac(exponent)
        if e >= self.horizon:
            raise InsufficientPrecision(f"q^{e} beyond horizon {self.horizon}")
        k = e * self.ram
        if k.denominator != 1:
            return {}
        return dict(sorted(self._c.get(int(k), {}).items()))

    def t_coefficient(self, degree: int) -> PuiseuxSeries:
        """Series in q multiplying ``t**degree``."""
        return PuiseuxSeries._raw(
            self.ram, {k: p[degree] for k, p in self._c.items() if degree in p}, self._hk
        )

    def q_valuation(self) -> Valuation:
        if not self._c:
            return AtLeast(self.horizon)
        return Known(Fraction(min(self._c), self.ram))

    def _vk(self) -> int:
        return min(self._c) if self._c else self._hk

    def is_zero_truncation(self) -> bool:
        return not self._c

    def lift(self, ram: int) -> tuple[dict, int]:
        m = ram // self.ram
        return {k * m: p for k, p in self._c.items()}, self._hk * m

    def _cone_shift(self, dv: Fraction):
        if self.cone is None:
            return None
        return (self.cone[0], self.cone[1] + dv)

    # -- ring operations ------------------------------------------------

    def __add__(self, other):
        if isinstance(other, PuiseuxSeries):
            other = BivariateSeries.from_series(other)
        if not isinstance(other, BivariateSeries):
            return NotImplemented
        n = _lcm(self.ram, other.ram)
        a, ha = self.lift(n)
        b, hb = other.lift(n)
        out = {k: dict(p) for k, p in a.items()}
        for k, p in b.items():
            row = out.setdefault(k, {})
            for d, c in p.items():
                row[d] = row.get(d, 0) + c
        cone = None
        if self.cone is not None and other.cone is not None:
            cone = (min(self.cone[0], other.cone[0]), min(self.cone[1], other.cone[1]))
        return BivariateSeries(n, out, min(ha, hb), cone)

    __radd__ = __add__

    def __neg__(self):
        return BivariateSeries(
            self.ram, {k: {d: -c for d, c in p.items()} for k, p in self._c.items()}, self._hk, self.cone
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _frac(other)
            return BivariateSeries(
                self.ram, {k: {d: v * c for d, v in p.items()} for k, p in self._c.items()}, self._hk, self.cone
            )
        if isinstance(other, PuiseuxSeries):
            cone = self._cone_shift(Fraction(other._vk(), other.ram)) if self.cone else None
            other = BivariateSeries.from_series(other)
            res = self._mul(other)
            return BivariateSeries(res.ram, res._c, res._hk, cone)
        if not isinstance(other, BivariateSeries):
            return NotImplemented
        return self._mul(other)

    __rmul__ = __mul__

    def _mul(self, other: "BivariateSeries") -> "BivariateSeries":
        n = _lcm(self.ram, other.ram)
        a, ha = self.lift(n)
        b, hb = other.lift(n)
        va = min(a) if a else ha
        vb = min(b) if b else hb
        hk = min(va + hb, vb + ha)
        out: dict[int, dict[int, Fraction]] = {}
        bi = sorted(b.items())
        for ka, pa in a.items():
            lim = hk - ka
            for kb, pb in bi:
                if kb >= lim:
                    break
                row = out.setdefault(ka + kb, {})
                for da, ca in pa.items():
                    for db, cb in pb.items():
                        d = da + db
                        row[d] = row.get(d, 0) + ca * cb
        cone = None
        if self.cone is not None and other.cone is not None:
            cone = (min(self.cone[0], other.cone[0]), self.cone[1] + other.cone[1])
        return BivariateSeries(n, out, hk, cone)

    def derivative_t(self) -> "BivariateSeries":
        out = {k: {d - 1: d * c for d, c in p.items() if d} for k, p in self._c.items()}
        cone = None if self.cone is None else (self.cone[0], self.cone[1] - self.cone[0])
        return BivariateSeries(self.ram, out, self._hk, cone)

    def inverse(self) -> "BivariateSeries":
        """Inverse of ``c0 * (1 + X)`` with ``c0`` a nonzero constant and ``v_q(X) > 0``."""
        if not self._c:
            raise InsufficientPrecision("cannot invert an all-zero truncation")
        v = min(self._c)
        lead = self._c[v]
        if set(lead) != {0}:
            raise InsufficientPrecision("leading q-coefficient must be a nonzero constant in t")
        c0 = lead[0]
        rest = {k - v: p for k, p in self._c.items() if k != v}
        x = BivariateSeries(self.ram, {k: {d: c / c0 for d, c in p.items()} for k, p in rest.items()}, self._hk - v)
        rel = self._hk - v
        # 1/(1+X) by the recurrence b_m = -sum_{i>=1} X_i b_{m-i}
        xs = sorted(x._c.items())
        b: list[dict[int, Fraction]] = [dict() for _ in range(rel)]
        if rel > 0:
            b[0] = {0: Fraction(1)}
        for m in range(1, rel):
            row: dict[int, Fraction] = {}
            for i, p in xs:
                if i > m:
                    break
                prev = b[m - i]
                for dp, cp in p.items():
                    for db, cb in prev.items():
                        d = dp + db
                        row[d] = row.get(d, 0) - cp * cb
            b[m] = {d: c for d, c in row.items() if c}
        inv_c0 = 1 / c0
        out = {m - v: {d: c * inv_c0 for d, c in p.items()} for m, p in enumerate(b) if p}
        cone = None
        if self.cone is not None:
            slope, off = self.cone
            vx = Fraction(min(x._c), self.ram) if x._c else Fraction(rel, self.ram)
            shift = Fraction(v, self.ram)
            # X has cone (slope, off - shift); blend with v_q(X) > 0 to bound every power of X
            xo = off - shift
            if xo >= 0:
                cone = (slope, -shift)
            else:
                lam = vx / (vx - xo)
                cone = (slope * lam, -shift)
        return BivariateSeries(self.ram, out, rel - v, cone)

    def log_derivative_t(self) -> "BivariateSeries":
        """``(d/dt a) / a``."""
        return self.derivative_t() * self.inverse()

    def substitute_t_scale(self, c: PuiseuxSeries) -> "BivariateSeries":
        """Substitute ``t -> c*t``; horizon shrinks according to the cone."""
        vc = c.valuation()
        if not vc.known:
            raise InsufficientPrecision("scale factor has unknown valuation")
        k = vc.value
        horizon = self.horizon
        cone = self.cone
        if k != 0:
            if cone is None or cone[0] <= abs(k):
                raise InsufficientPrecision("substitution needs a growth cone steeper than |v(c)|")
            slope, off = cone
            horizon = horizon - abs(k) * (horizon - off) / slope
            cone = (slope - abs(k), off)
        # relative precision of c bounds every image term
        rel_c = c.horizon - k
        powers: dict[int, PuiseuxSeries] = {}
        inv = None
        acc = BivariateSeries.from_terms({}, horizon)
        out: dict[tuple[Fraction, int], Fraction] = {}
        for (e, d), coef in self.terms.items():
            if d not in powers:
                if d >= 0:
                    powers[d] = c ** d
                else:
                    inv = inv or c.inverse()
                    powers[d] = inv ** (-d)
            p = powers[d]
            horizon = min(horizon, e + k * d + rel_c)
            for pe, pc in p.terms.items():
                key = (e + pe, d)
                out[key] = out.get(key, 0) + coef * pc
        acc = BivariateSeries.from_terms(out, horizon, cone)
        return acc

    def __eq__(self, other):
        if not isinstance(other, BivariateSeries):
            return NotImplemented
        return self.terms == other.terms and self.horizon == other.horizon

    def __hash__(self):
        return hash((self.horizon, tuple(self.terms.items())))

    def __repr__(self):
        return f"BivariateSeries(<{len(self.terms)} terms>, horizon={self.horizon})"


def theta_bar(index: int, q_horizon=DEFAULT_HORIZON, t_degree_bound: int = DEFAULT_T_DEGREE_BOUND) -> BivariateSeries:
    """The reduced theta series ``theta_bar_i(t, -q^2)``, i = 1..4.

    The horizon is lowered if the degree bound would drop a term below it.
    """
    if index not in (1, 2, 3, 4):
        raise ValueError("index must be 1, 2, 3 or 4")
    q_horizon = _frac(q_horizon)
    if q_horizon <= 0 or t_degree_bound <= 0:
        raise ValueError("bounds must be positive")
    horizon = q_horizon
    terms: dict[tuple[Fraction, int], Fraction] = {}
    bound = math.isqrt(int(q_horizon) + 1) + 2
    for n in range(-bound, bound + 1):
        if index in (3, 4):
            e, d = 2 * n * n, 2 * n
        else:
            e, d = 2 * n * n + 2 * n, 2 * n + 1
        if e >= q_horizon:
            continue
        if abs(d) > t_degree_bound:
            horizon = min(horizon, Fraction(e))
            continue
        sign = -1 if (index in (1, 3) and n % 2) else 1
        terms[(Fraction(e), d)] = Fraction(sign)
    rho = Fraction(max(1, math.isqrt(int(2 * q_horizon))))
    off = -rho * rho / 2 - (Fraction(1, 2) if index in (1, 2) else 0)
    return BivariateSeries.from_terms(terms, horizon, cone=(rho, off))


def theta_bar_value(index: int, t: PuiseuxSeries, horizon=DEFAULT_HORIZON) -> PuiseuxSeries:
    """Evaluate ``theta_bar_i(t, -q^2)`` at a series ``t`` with known valuation."""
    vt = t.valuation()
    if not vt.known:
        raise InsufficientPrecision("t has unknown valuation")
    w = vt.value
    horizon = _frac(horizon)
    odd = index in (1, 2)
    total = PuiseuxSeries.zero(horizon)
    inv = None
    # term valuation 2n^2 + 2n*w (+ (2n+1)-shift for theta_1,2) grows quadratically in n
    reach = math.isqrt(max(0, math.ceil((horizon + w * w) / 2)) + 4) + 1
    n_lo = math.floor(-w / 2) - reach - 2
    n_hi = math.ceil(-w / 2) + reach + 2
    if odd:
        n_lo, n_hi = n_lo - 1, n_hi + 1
    for n in range(n_lo, n_hi + 1):
        if odd:
            e, d = 2 * n * n + 2 * n, 2 * n + 1
        else:
            e, d = 2 * n * n, 2 * n
        if e + d * w >= horizon:
            continue
        if d >= 0:
            td = t ** d
        else:
            inv = inv or t.inverse()
            td = inv ** (-d)
        term = td.shift(e)
        if index in (1, 3) and n % 2:
            term = -term
        total = total + term
    return total.truncate(horizon)


def theta_shift_residuals(q_horizon=DEFAULT_HORIZON, t_degree_bound: int = DEFAULT_T_DEGREE_BOUND) -> dict[str, BivariateSeries]:
    """Differences for the four half-period shifts ``t -> t*q``; each vanishes identically."""
    q1 = PuiseuxSeries.monomial(1, 1, q_horizon)
    th = {i: theta_bar(i, q_horizon, t_degree_bound) for i in (1, 2, 3, 4)}
    shifted = {i: th[i].substitute_t_scale(q1) for i in (1, 2, 3, 4)}
    t = BivariateSeries.from_terms({(0, 1): 1}, q_horizon + 1)
    tq = BivariateSeries.from_terms({(1, 1): 1}, q_horizon + 2)
    return {
        "theta1(t) - t*theta3(tq)": th[1] - t * shifted[3],
        "theta2(t) - t*theta4(tq)": th[2] - t * shifted[4],
        "theta3(t) + tq*theta1(tq)": th[3] + tq * shifted[1],
        "theta4(t) - tq*theta2(tq)": th[4] - tq * shifted[2],
    }
