from fractions import Fraction as F

import pytest
import sympy as sp

from tropedwards.edwards import (
    FamilyParams,
    classical_j,
    constant_term_d0,
    curve_residual,
    edwards_a_squared,
    edwards_xy,
    evaluate_family,
    family_coefficients,
    generic_unit,
    j_from_a_squared,
    j_invariant_check,
    tate_periodicity_residuals,
    tate_point,
    trop_valuations,
)
from tropedwards.errors import DegenerateParams, InsufficientPrecision, UndefinedDelta
from tropedwards.expr import parse_series
from tropedwards.series import PuiseuxSeries, epsilon_bar, euler_epsilon


def fp(r: str, s: str, horizon=24) -> FamilyParams:
    return FamilyParams(parse_series(r, horizon), parse_series(s, horizon))


def test_coefficients_against_symbolic_substitution():
    e, eb, r, s, X, Y = sp.symbols("e eb r s X Y")
    a2 = 2 * e**2 * eb**2 / (e**4 + eb**4)
    x = (r * X + eb) / (s * X + e)
    y = (r * Y + eb) / (s * Y + e)
    num, den = sp.fraction(sp.together(x**2 + y**2 - a2 * (1 + x**2 * y**2)))
    assert sp.expand(den - (e**4 + eb**4) * (s * X + e) ** 2 * (s * Y + e) ** 2) == 0
    er_bs = e * r - eb * s
    e4mb4 = e**4 - eb**4
    f = (
        2 * e * eb * e4mb4 * (eb * s - e * r) * (X + Y)
        + e4mb4 * (eb**2 * s**2 - e**2 * r**2) * (X**2 + Y**2)
        + 8 * e * eb * er_bs * (eb**3 * r - e**3 * s) * X * Y
        + 2 * er_bs * (-e4mb4 * r * s + 2 * e * eb * (eb**2 * r**2 - e**2 * s**2)) * X * Y * (X + Y)
        + 2 * (e**2 * s**2 - eb**2 * r**2) * (eb**2 * s**2 - e**2 * r**2) * X**2 * Y**2
    )
    assert sp.expand(num + f) == 0


def test_series_substitution_matches_family():
    h = 16
    p = fp("1-3q", "-1+q", h)
    X = parse_series("2+q", h)
    Y = parse_series("-1+q^(1/2)", h)
    e, b = euler_epsilon(h), epsilon_bar(h)
    x = (p.r * X + b) / (p.s * X + e)
    y = (p.r * Y + b) / (p.s * Y + e)
    res = curve_residual(x, y, edwards_a_squared(h))
    den = (e**4 + b**4) * (p.s * X + e) ** 2 * (p.s * Y + e) ** 2
    f = evaluate_family(family_coefficients(p), X, Y)
    total = res * den + f
    assert total.is_zero_truncation() and total.horizon >= 12


def test_d0_vanishes():
    d0 = constant_term_d0(24)
    assert d0.is_zero_truncation() and d0.horizon == 24


def test_j_invariant_leading_coefficients():
    rep = j_invariant_check(24)
    assert rep["status"] == "pass"
    j = rep["series"]
    assert (j.coefficient(-8), j.coefficient(0), j.coefficient(8)) == (1, 744, 196884)


def test_classical_j_oracle():
    j = classical_j(4)
    assert [j.coefficient(n) for n in range(-1, 3)] == [1, 744, 196884, 21493760]


def test_j_needs_enough_horizon():
    with pytest.raises(InsufficientPrecision):
        j_invariant_check(F(18))
    assert j_from_a_squared(edwards_a_squared(19)).horizon > 8


def test_square_case_valuations():
    u = trop_valuations(family_coefficients(fp("1-3q", "-1+q")))
    assert (u.u12.value, u.u5.value, u.u67.value) == (1, 0, 1)
    assert u.u34.value == u.u8.value == 3


def test_delta_values():
    assert fp("1-3q", "-1+q").delta() == 1
    assert fp("1+q^(3/2)", "-1+q^(3/2)").delta() == F(3, 2)
    with pytest.raises(UndefinedDelta):
        fp("1", "1").delta()


def test_degenerate_params_refused():
    h = 12
    with pytest.raises(DegenerateParams):
        FamilyParams(epsilon_bar(h), euler_epsilon(h))


@pytest.mark.parametrize("u", [F(1, 8), F(3, 8), F(5, 8)])
def test_tate_points_lie_on_the_family_curve(u):
    p = fp("1-3q", "-1+q", 16)
    tp = tate_point(u, None, p, 12)
    f = evaluate_family(family_coefficients(p), tp.xx, tp.yy)
    assert f.is_zero_truncation() and f.horizon >= 10
    assert curve_residual(tp.x, tp.y, edwards_a_squared(12)).is_zero_truncation()


def test_tate_periodicity():
    t = generic_unit(14).shift(F(1, 2))
    for name, res in tate_periodicity_residuals(t, 14).items():
        assert res.is_zero_truncation() and res.horizon == 14, name


def test_scaling_translation_swaps_coordinates():
    t = generic_unit(12).shift(F(1, 4))
    x, y = edwards_xy(t, 12)
    xq, yq = edwards_xy(t.shift(1), 12)
    assert (xq - y).is_zero_truncation()
    assert (yq + x).is_zero_truncation()


def test_tate_point_requires_a_unit():
    with pytest.raises(ValueError):
        tate_point(F(1, 8), PuiseuxSeries({1: 1}, 12), fp("1-3q", "-1+q"), 12)
