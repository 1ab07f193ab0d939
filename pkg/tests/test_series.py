from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tropedwards.errors import InsufficientPrecision, NotASquare
from tropedwards.series import (
    AtLeast,
    BivariateSeries,
    Known,
    PuiseuxSeries,
    epsilon_bar,
    euler_epsilon,
    format_series,
    theta_bar,
    theta_bar_value,
    theta_shift_residuals,
)

rationals = st.fractions(min_value=-6, max_value=6, max_denominator=4)


@st.composite
def series(draw, min_exp=-3, max_exp=8):
    ram = draw(st.sampled_from([1, 2, 3]))
    keys = draw(st.lists(st.integers(min_exp * ram, max_exp * ram), max_size=5))
    terms = {F(k, ram): draw(rationals) for k in keys}
    horizon = F(draw(st.integers(min_exp * ram + 1, (max_exp + 4) * ram)), ram)
    return PuiseuxSeries(terms, horizon, ram)


@st.composite
def units(draw):
    a = draw(series(min_exp=0, max_exp=6))
    c0 = draw(st.fractions(min_value=F(1, 3), max_value=5, max_denominator=3))
    return a.shift(1) + PuiseuxSeries.constant(c0, a.horizon + 1) if a.horizon > 0 else PuiseuxSeries.constant(c0, 4)


def convolve(a: PuiseuxSeries, b: PuiseuxSeries) -> PuiseuxSeries:
    """Schoolbook product with the truncation rule written out independently."""
    va = min(a.terms, default=a.horizon)
    vb = min(b.terms, default=b.horizon)
    h = min(va + b.horizon, vb + a.horizon)
    out: dict = {}
    for ea, ca in a.terms.items():
        for eb, cb in b.terms.items():
            if ea + eb < h:
                out[ea + eb] = out.get(ea + eb, 0) + ca * cb
    return PuiseuxSeries(out, h)


def partitions(n: int) -> int:
    def count(m, largest):
        if m == 0:
            return 1
        return sum(count(m - k, k) for k in range(1, min(m, largest) + 1))

    return count(n, n)


def distinct_partitions(n: int) -> int:
    def count(m, largest):
        if m == 0:
            return 1
        return sum(count(m - k, k - 1) for k in range(1, min(m, largest) + 1))

    return count(n, n)


# -- oracles ------------------------------------------------------------------


def test_euler_epsilon_counts_distinct_partitions():
    eps = euler_epsilon(20)
    assert [eps.coefficient(n) for n in range(20)] == [distinct_partitions(n) for n in range(20)]


def test_inverse_product_gives_partition_numbers():
    h = 18
    prod = PuiseuxSeries.constant(1, h)
    for n in range(1, h):
        prod = prod * PuiseuxSeries({0: 1, n: -1}, h)
    inv = prod.inverse()
    assert inv.horizon == h
    assert [inv.coefficient(n) for n in range(h)] == [partitions(n) for n in range(h)]


def test_epsilon_bar_is_twist():
    assert epsilon_bar(10) == PuiseuxSeries({n: (-1) ** n * distinct_partitions(n) for n in range(10)}, 10)


@given(series(), series())
def test_product_matches_convolution(a, b):
    assert a * b == convolve(a, b)


# -- ring laws ---------------------------------------------------------------


@given(series(), series(), series())
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - b) + b == a + (b - b)
    assert (a - a).is_zero_truncation()


@given(series())
def test_horizon_rule_for_products(a):
    b = PuiseuxSeries({0: 1, 1: 1}, 5)
    p = a * b
    if a.is_zero_truncation():
        assert not p.terms
    else:
        assert p.horizon == min(a.valuation().value + 5, a.horizon)


@given(units(), st.integers(-4, 4))
def test_inverse_round_trip(u, e):
    a = u.shift(F(e, 2))
    one = a * a.inverse()
    assert one.horizon == u.horizon
    assert one == PuiseuxSeries.constant(1, u.horizon)


@given(units(), st.integers(-3, 3))
def test_sqrt_round_trip(u, e):
    a = u * u
    a = a.shift(e)
    r = a.sqrt()
    assert r.principal_coefficient() > 0
    assert (r * r - a).is_zero_truncation()


def test_sqrt_of_odd_valuation_lifts_ramification():
    r = PuiseuxSeries({1: 4, 2: 4}, 10).sqrt()
    assert r.valuation() == Known(F(1, 2))
    assert r.ram == 2
    assert (r * r).agrees_with(PuiseuxSeries({1: 4, 2: 4}, 10))


def test_sqrt_refuses_non_square_leading_coefficient():
    with pytest.raises(NotASquare):
        PuiseuxSeries({0: 2, 1: 1}, 6).sqrt()
    with pytest.raises(NotASquare):
        PuiseuxSeries({0: -1}, 6).sqrt()


def test_zero_truncation_has_lower_bound_only():
    z = PuiseuxSeries({3: 1}, 8) - PuiseuxSeries({3: 1}, 8)
    assert z.valuation() == AtLeast(8)
    with pytest.raises(InsufficientPrecision):
        z.inverse()
    with pytest.raises(InsufficientPrecision):
        z.principal_coefficient()
    with pytest.raises(InsufficientPrecision):
        z.coefficient(9)


@given(series())
def test_json_round_trip(a):
    assert PuiseuxSeries.from_json(a.to_json()) == a


def test_format():
    a = PuiseuxSeries({0: 1, F(3, 2): F(-1, 2), 2: -3}, 4)
    assert format_series(a) == "1 - (1/2)*q^(3/2) - 3*q^2"


# -- theta series -------------------------------------------------------------


def test_theta_shift_identities_hold_with_slack():
    for name, res in theta_shift_residuals(24).items():
        assert res.is_zero_truncation(), name
        assert res.horizon >= 17, name


def test_theta_bar_coefficients():
    th3 = theta_bar(3, 20)
    assert th3.q_coefficient(0) == {0: 1}
    assert th3.q_coefficient(2) == {2: -1, -2: -1}
    assert th3.q_coefficient(8) == {4: 1, -4: 1}
    th1 = theta_bar(1, 20)
    assert th1.q_coefficient(0) == {1: 1, -1: -1}
    assert th1.q_coefficient(4) == {3: -1, -3: 1}


def test_theta_value_matches_bivariate_series():
    t = PuiseuxSeries({F(1, 2): 3, F(3, 2): 1}, 20)
    for i in (1, 2, 3, 4):
        direct = theta_bar_value(i, t, 10)
        summed = PuiseuxSeries.zero(10)
        for (e, d), c in theta_bar(i, 20).terms.items():
            if e + d * F(1, 2) < 10:
                term = (t ** d if d >= 0 else t.inverse() ** (-d)).shift(e) * c
                summed = summed + term
        assert (direct - summed.truncate(10)).is_zero_truncation(), i


def test_bivariate_inverse_round_trip():
    th4 = theta_bar(4, 12)
    prod = th4 * th4.inverse()
    one = BivariateSeries.from_terms({(0, 0): 1}, prod.horizon)
    assert (prod - one).is_zero_truncation()
