from fractions import Fraction as F
from types import SimpleNamespace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tropedwards.bttree import (
    End,
    PERIOD,
    bt_pipeline,
    build_tree,
    cross_ratio_length,
    cross_ratio_valuation,
    delta_at_t_squared,
    delta_series,
    diff_valuation,
    fit_pole_factors,
    verify_tree_metric,
    zero_divisor,
)
from tropedwards.edwards import FamilyParams
from tropedwards.errors import NotSmooth, OffsetMismatch
from tropedwards.expr import parse_series
from tropedwards.series import PuiseuxSeries, epsilon_bar, euler_epsilon
from tropedwards.tropcurve import classify


def fp(r, s):
    return FamilyParams(parse_series(r), parse_series(s))


SQUARE = fp("1-3q", "-1+q")
HEPTAGON = fp("1+q^(3/2)", "-1+q^(3/2)")


def poly(coeffs, horizon=8):
    return PuiseuxSeries({k: c for k, c in enumerate(coeffs)}, horizon)


@pytest.fixture(scope="module")
def square_report():
    return bt_pipeline(SQUARE, classify(SQUARE).curve)


@pytest.fixture(scope="module")
def heptagon_report():
    return bt_pipeline(HEPTAGON, classify(HEPTAGON).curve)


def test_yy_numerator_vanishes_at_zero_divisor():
    h = 20
    # eps*theta3 - epsb*theta4 is Delta with (r, s) = (-epsb, -eps)
    numerator = SimpleNamespace(r=-epsilon_bar(h), s=-euler_epsilon(h))
    for e in (1, -1, 7, 9):
        assert delta_at_t_squared(numerator, PuiseuxSeries({e: 1}, h), 16).is_zero_truncation(), e
    assert not delta_at_t_squared(numerator, PuiseuxSeries({2: 1}, h), 16).is_zero_truncation()


def test_zero_divisor_window():
    zeros = zero_divisor()
    assert all(F(-1, 2) <= z.exponent < F(15, 2) for z in zeros)
    assert sorted({z.exponent for z in zeros}) == [F(-1, 2), F(1, 2), F(3, 2), F(7, 2), F(9, 2), F(11, 2)]
    assert all(z.sign in (1, -1) for z in zeros)


def test_fitted_factors_are_zeros_of_delta():
    fit = fit_pole_factors(delta_series(SQUARE))
    assert (fit.xi.offset_a, fit.eta.offset_a) == (3, 5)
    for fac in (fit.xi, fit.eta):
        for n in (0, 1):
            T = -fac.xi.inverse().shift(8 * n - fac.offset_a)
            res = delta_at_t_squared(SQUARE, T, 16)
            assert res.is_zero_truncation() and res.horizon == 16


def test_offsets_are_checked():
    with pytest.raises(OffsetMismatch):
        fit_pole_factors(delta_series(SQUARE), offsets=(1, 5))


def test_square_fit_values(square_report):
    fit = square_report.fit
    assert fit.xi.xi.truncate(8) == -poly([1, 2, 3, 10, 15, 38, 51, 162])
    assert fit.eta.xi.truncate(8) == -poly([1, -2, 1, -6, 14, -28, 84, -232])
    for name, fac in (("xibar", fit.xi), ("etabar", fit.eta)):
        bar = square_report.bars[name]
        assert (bar * bar + fac.xi.inverse()).is_zero_truncation()


def test_heptagon_fit_values(heptagon_report):
    fit = heptagon_report.fit
    assert (fit.xi.offset_a, fit.eta.offset_a) == (F(7, 2), F(9, 2))
    assert fit.xi.xi.truncate(8) == poly([1, -1, -1, -2, -5, -14, -42, -131])
    assert fit.eta.xi.truncate(8) == poly([1, 1, 2, 5, 14, 42, 132, 428])
    # -xi^-1 has principal coefficient -1: its square root is not rational
    assert heptagon_report.bars == {"xibar": None, "etabar": None}


def test_square_cross_ratio_lengths(square_report):
    lengths = {labels: length for labels, length in square_report.cross_ratios}
    assert lengths[("0", "xibar*q^(-1/2)", "etabar*q^(5/2)", "oo")] == 3
    assert lengths[("xibar*q^(-1/2)", "xibar*q^(5/2)", "etabar*q^(5/2)", "oo")] == 4


@pytest.mark.parametrize("name", ["square_report", "heptagon_report"])
def test_tree_quotient_and_isometry(name, request):
    rep = request.getfixturevalue(name)
    ends = rep.zeros + rep.poles
    assert verify_tree_metric(rep.tree, ends) == []
    assert rep.tree.betti_number() == 0 and rep.tree.is_connected()
    assert rep.squared.betti_number() == 0
    assert rep.quotient.betti_number() == 1 and rep.quotient.is_connected()
    assert len(rep.quotient.ends) == 7
    assert rep.quotient.cycle_len == PERIOD
    assert rep.isometry["isometric"] is True


def test_non_smooth_curve_is_refused():
    p = fp("1+q^2", "-1+q^2")
    with pytest.raises(NotSmooth):
        bt_pipeline(p, classify(p).curve)


# -- cross ratios on ends ------------------------------------------------------

one = PuiseuxSeries.constant(1, 12)
end_strategy = st.builds(
    lambda sign, e, c: End(sign, one + PuiseuxSeries({1: c}, 12), F(e, 2), "finite", f"{sign}:{e}:{c}"),
    st.sampled_from([1, -1]),
    st.integers(-6, 6),
    st.integers(-2, 2),
)


@given(st.lists(end_strategy, min_size=4, max_size=4, unique_by=lambda z: z.key()))
def test_cross_ratio_symmetries(ends):
    w, x, y, z = ends
    v = cross_ratio_valuation(w, x, y, z)
    assert cross_ratio_valuation(x, w, z, y) == v
    assert cross_ratio_valuation(y, z, w, x) == v
    assert cross_ratio_valuation(x, w, y, z) == -v
    assert cross_ratio_length(w, x, y, z) >= 0


@given(st.lists(end_strategy, min_size=3, max_size=3, unique_by=lambda z: z.key()))
def test_ultrametric_inequality(ends):
    a, b, c = ends
    vs = sorted([diff_valuation(a, b), diff_valuation(b, c), diff_valuation(a, c)])
    assert vs[0] == vs[1]


@given(st.lists(end_strategy, min_size=4, max_size=7, unique_by=lambda z: z.key()))
def test_tree_realizes_cross_ratios(ends):
    all_ends = ends + [End.zero(), End.infinity()]
    tree = build_tree(all_ends)
    assert tree.betti_number() == 0
    assert verify_tree_metric(tree, all_ends) == []


def test_squaring_doubles_valuation():
    z = End(-1, one + PuiseuxSeries({1: 3}, 12), F(1, 2), "finite", "z")
    sq = z.square()
    assert sq.exponent == 1 and sq.sign == 1
    assert diff_valuation(z, z.negated()) == F(1, 2)
