"""The two-parameter Edwards family and its algebraic identities.

Curve model: ``x^2 + y^2 = a^2 (1 + x^2 y^2)`` with
``a^2 = 2 eps^2 epsb^2 / (eps^4 + epsb^4)``.  The Moebius change of
coordinates ``x -> (eps*x - epsb)/(-s*x + r)`` turns it into the symmetric
quartic ``f_{r,s}``, whose five coefficients are built here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateParams, InsufficientPrecision, PolarPoint, UndefinedDelta
from .series import (
    DEFAULT_HORIZON,
    PuiseuxSeries,
    Valuation,
    epsilon_bar,
    euler_epsilon,
    theta_bar_value,
)

COEFFICIENT_NAMES = ("d12", "d34", "d5", "d67", "d8")


@dataclass(frozen=True)
class FamilyParams:
    r: PuiseuxSeries
    s: PuiseuxSeries

    def __post_init__(self):
        h = self.horizon
        eps, epsb = euler_epsilon(h), epsilon_bar(h)
        if not (eps * self.r - epsb * self.s).valuation().known:
            raise DegenerateParams("eps*r - epsb*s vanishes at this truncation")

    @property
    def horizon(self) -> Fraction:
        return min(self.r.horizon, self.s.horizon)

    def v_plus(self) -> Fraction:
        v = (self.r + self.s).valuation()
        if not v.known:
            raise UndefinedDelta("r + s vanishes at this truncation")
        return v.value

    def v_minus(self) -> Fraction:
        v = (self.r - self.s).valuation()
        if not v.known:
            raise UndefinedDelta("r - s vanishes at this truncation")
        return v.value

    def delta(self) -> Fraction:
        return self.v_plus() - self.v_minus()


@dataclass(frozen=True)
class EdwardsCoefficients:
    d12: PuiseuxSeries
    d34: PuiseuxSeries
    d5: PuiseuxSeries
    d67: PuiseuxSeries
    d8: PuiseuxSeries
    a_squared: PuiseuxSeries

    def as_dict(self) -> dict[str, PuiseuxSeries]:
        return {name: getattr(self, name) for name in COEFFICIENT_NAMES}


@dataclass(frozen=True)
class TropCoefficientVector:
    u12: Valuation
    u34: Valuation
    u5: Valuation
    u67: Valuation
    u8: Valuation

    def as_dict(self) -> dict[str, Valuation]:
        return {"u12": self.u12, "u34": self.u34, "u5": self.u5, "u67": self.u67, "u8": self.u8}


@dataclass(frozen=True)
class TatePoint:
    t_exponent: Fraction
    t_unit: PuiseuxSeries
    x: PuiseuxSeries
    y: PuiseuxSeries
    xx: PuiseuxSeries
    yy: PuiseuxSeries

    @property
    def horizon(self) -> Fraction:
        return min(self.x.horizon, self.y.horizon, self.xx.horizon, self.yy.horizon)


def edwards_a_squared(horizon=DEFAULT_HORIZON) -> PuiseuxSeries:
    if horizon < 4:
        raise InsufficientPrecision("a^2 needs horizon >= 4")
    eps, epsb = euler_epsilon(horizon), epsilon_bar(horizon)
    e2, b2 = eps * eps, epsb * epsb
    return 2 * e2 * b2 / (e2 * e2 + b2 * b2)


def family_coefficients(params: FamilyParams) -> EdwardsCoefficients:
    h = params.horizon
    e, b = euler_epsilon(h), epsilon_bar(h)
    r, s = params.r, params.s
    e2, b2 = e * e, b * b
    e4mb4 = e2 * e2 - b2 * b2
    eb = e * b
    er_bs = e * r - b * s
    d12 = 2 * eb * e4mb4 * (b * s - e * r)
    d34 = e4mb4 * (b2 * s * s - e2 * r * r)
    d5 = 8 * eb * er_bs * (b2 * b * r - e2 * e * s)
    d67 = 2 * er_bs * ((-e4mb4) * r * s + 2 * eb * (b2 * r * r - e2 * s * s))
    d8 = 2 * (e2 * s * s - b2 * r * r) * (b2 * s * s - e2 * r * r)
    return EdwardsCoefficients(d12, d34, d5, d67, d8, edwards_a_squared(h))


def trop_valuations(coeffs: EdwardsCoefficients) -> TropCoefficientVector:
    return TropCoefficientVector(*(getattr(coeffs, n).valuation() for n in COEFFICIENT_NAMES))


def evaluate_family(coeffs: EdwardsCoefficients, X: PuiseuxSeries, Y: PuiseuxSeries) -> PuiseuxSeries:
    """``f_{r,s}(X, Y)``."""
    XY = X * Y
    return (
        coeffs.d12 * (X + Y)
        + coeffs.d34 * (X * X + Y * Y)
        + coeffs.d5 * XY
        + coeffs.d67 * XY * (X + Y)
        + coeffs.d8 * XY * XY
    )


def constant_term_d0(horizon=DEFAULT_HORIZON) -> PuiseuxSeries:
    """``2 alpha^2 beta^2 - a^2 (alpha^4 + beta^4)`` at ``alpha = epsb``, ``beta = eps``."""
    al, be = epsilon_bar(horizon), euler_epsilon(horizon)
    a2 = edwards_a_squared(horizon)
    al2, be2 = al * al, be * be
    return 2 * al2 * be2 - a2 * (al2 * al2 + be2 * be2)


# -- j-invariant ------------------------------------------------------------


def j_from_a_squared(a2: PuiseuxSeries) -> PuiseuxSeries:
    a4 = a2 * a2
    num = (a4 * a4 + 14 * a4 + 1) ** 3
    return Fraction(1728, 108) * num / (a4 * (a4 - 1) ** 4)


def _sigma3(n: int) -> int:
    return sum(d**3 for d in range(1, n + 1) if n % d == 0)


def classical_j(horizon) -> PuiseuxSeries:
    """``E4^3 / Delta`` from divisor sums and the product formula, in the variable q."""
    horizon = Fraction(horizon)
    n_top = int(horizon) + 2
    e4 = PuiseuxSeries({0: 1, **{n: 240 * _sigma3(n) for n in range(1, n_top)}}, n_top)
    prod = PuiseuxSeries.constant(1, n_top)
    for n in range(1, n_top):
        prod = prod * PuiseuxSeries({0: 1, n: -1}, n_top) ** 24
    disc = prod.shift(1)
    return (e4**3 / disc).truncate(horizon)


def substitute_power(a: PuiseuxSeries, k: int) -> PuiseuxSeries:
    """``a(q^k)`` for a positive integer ``k``."""
    return PuiseuxSeries({e * k: c for e, c in a.terms.items()}, a.horizon * k, a.ram)


def j_invariant_check(horizon=DEFAULT_HORIZON) -> dict:
    """Compare ``j(E_a)`` against the classical q-expansion evaluated at ``q^8``."""
    horizon = Fraction(horizon)
    j = j_from_a_squared(edwards_a_squared(horizon))
    if j.horizon <= 8:
        raise InsufficientPrecision(
            f"j-series known only below q^{j.horizon}; need beyond q^8 (horizon >= 19)"
        )
    reference = substitute_power(classical_j(j.horizon / 8 + 1), 8).truncate(j.horizon)
    diff = j - reference
    report = {"identity": "j-invariant", "horizon": j.horizon, "series": j}
    v = diff.valuation()
    if v.known:
        report["status"] = "fail"
        report["first_mismatch_exponent"] = v.value
    else:
        report["status"] = "pass"
    return report


# -- Tate-parametrized points -----------------------------------------------


def _nonzero(a: PuiseuxSeries, what: str) -> PuiseuxSeries:
    if not a.valuation().known:
        raise PolarPoint(f"{what} vanishes at this truncation")
    return a


def generic_unit(horizon=DEFAULT_HORIZON) -> PuiseuxSeries:
    """A unit whose principal coefficient avoids accidental cancellations."""
    return PuiseuxSeries({0: 3, 1: 1}, horizon)


def edwards_xy(t: PuiseuxSeries, horizon) -> tuple[PuiseuxSeries, PuiseuxSeries]:
    th = [theta_bar_value(i, t, horizon) for i in (1, 2, 3, 4)]
    x = -th[0] / _nonzero(th[1], "theta_2(t)")
    y = th[2] / _nonzero(th[3], "theta_4(t)")
    return x, y


def moebius(params: FamilyParams, z: PuiseuxSeries) -> PuiseuxSeries:
    h = params.horizon
    eps, epsb = euler_epsilon(h), epsilon_bar(h)
    return (eps * z - epsb) / _nonzero(params.r - params.s * z, "r - s*x")


def tate_point(u, unit: PuiseuxSeries | None, params: FamilyParams, horizon=None) -> TatePoint:
    """Point with ``t = unit * q^(2u)``; horizons record all precision lost to division."""
    u = Fraction(u)
    horizon = Fraction(horizon) if horizon is not None else params.horizon
    if unit is None:
        unit = generic_unit(horizon)
    vu = unit.valuation()
    if not vu.known or vu.value != 0:
        raise ValueError("unit must have valuation 0")
    t = unit.shift(2 * u)
    x, y = edwards_xy(t, horizon)
    return TatePoint(u, unit, x, y, moebius(params, x), moebius(params, y))


def tate_periodicity_residuals(t: PuiseuxSeries, horizon) -> dict[str, PuiseuxSeries]:
    """Differences that vanish by the quasi-periodicity of the theta quotients."""
    x, y = edwards_xy(t, horizon)
    xq, yq = edwards_xy(t.shift(1), horizon)
    xm, ym = edwards_xy(-t, horizon)
    x4, y4 = edwards_xy(t.shift(4), horizon)
    return {
        "x(tq)-y(t)": xq - y,
        "y(tq)+x(t)": yq + x,
        "x(-t)-x(t)": xm - x,
        "y(-t)-y(t)": ym - y,
        "x(tq^4)-x(t)": x4 - x,
        "y(tq^4)-y(t)": y4 - y,
    }


def curve_residual(x: PuiseuxSeries, y: PuiseuxSeries, a2: PuiseuxSeries) -> PuiseuxSeries:
    x2, y2 = x * x, y * y
    return x2 + y2 - a2 * (1 + x2 * y2)
