import warnings
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tropedwards.edwards import FamilyParams, tate_point
from tropedwards.errors import ExceptionalParameter
from tropedwards.expr import parse_series
from tropedwards.thetaparam import (
    CycleParam,
    breakpoints,
    choose_offset,
    cycle_point,
    delta_shape,
    exact_polygon,
    in_exceptional_set,
    point_valuations,
    polygon_length,
    sample_cycle,
    theta_even,
    theta_odd,
)
from tropedwards.tropcurve import POLYGON_KINDS

params_u = st.fractions(min_value=-6, max_value=6, max_denominator=48)
deltas = st.fractions(min_value=-4, max_value=4, max_denominator=8)


@given(params_u)
def test_theta_identities(u):
    assert theta_odd(u + 2) == theta_odd(u)
    assert theta_even(u + 2) == theta_even(u)
    assert theta_odd(-u) == theta_odd(u)
    assert theta_even(-u) == theta_even(u)
    assert theta_even(u + 1) == theta_odd(u)
    assert -2 <= theta_odd(u) <= 0


def test_theta_values():
    assert theta_odd(1) == 0 and theta_odd(0) == -2
    assert theta_even(0) == 0 and theta_even(1) == -2
    assert theta_odd(F(1, 2)) == F(-1, 2)


@given(deltas, params_u)
def test_locus_has_period_two(d, u):
    cp = CycleParam(d, F(0))
    assert cycle_point(cp, u + 2) == cycle_point(cp, u)


@given(deltas)
def test_exact_polygon_matches_prediction(d):
    cp = CycleParam(d, F(0))
    pred = delta_shape(d)
    if pred.kind == "Degenerate":
        return
    poly = exact_polygon(cp)
    assert POLYGON_KINDS[len(poly)] == pred.kind
    assert polygon_length(poly) == pred.length


@pytest.mark.filterwarnings("ignore:grid offset")
@given(deltas, st.fractions(min_value=-3, max_value=3, max_denominator=4))
def test_shape_depends_only_on_delta(d, shift):
    a = sample_cycle(CycleParam(d, F(0)))
    b = sample_cycle(CycleParam(d + shift, shift))
    assert (a.kind, a.length) == (b.kind, b.length)


@pytest.mark.parametrize(
    "d,kind,length",
    [
        (F(-1, 2), "Square", 2),
        (F(1, 2), "Square", 6),
        (F(1), "Square", 8),
        (F(3, 2), "Heptagon", 8),
        (F(2), "Pentagon", 8),
        (F(9, 4), "Pentagon", 8),
    ],
)
def test_sampled_shapes(d, kind, length):
    s = sample_cycle(CycleParam(d, F(0)))
    assert (s.kind, s.length) == (kind, length)


@pytest.mark.parametrize("d,length", [(F(-3, 2), F(1, 2)), (F(-5, 2), 1)])
def test_degenerate_locus_is_reported_as_segments(d, length):
    s = sample_cycle(CycleParam(d, F(0)))
    assert s.kind == "Degenerate"
    assert s.length == length
    assert s.segments


def test_breakpoints_include_integers():
    bps = breakpoints(CycleParam(F(1), F(0)))
    assert F(0) in bps and F(1) in bps
    assert all(0 <= b < 2 for b in bps)


def test_exceptional_set():
    cp = CycleParam(F(1), F(0))
    assert in_exceptional_set(cp, 1)
    with pytest.raises(ExceptionalParameter):
        point_valuations(cp, F(1))
    with pytest.raises(ExceptionalParameter):
        point_valuations(cp, F(3, 2))


def test_offset_moves_off_ties_with_warning():
    cp = CycleParam(F(1), F(0))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        off = choose_offset(cp, F(1, 2))
    assert off == F(1, 8)
    assert caught
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert choose_offset(cp, F(1, 16)) == F(1, 32)


def test_point_valuations_match_series_path_in_square_case():
    p = FamilyParams(parse_series("1-3q"), parse_series("-1+q"))
    cp = CycleParam.from_params(p)
    for u in (F(1, 4) + F(1, 32), F(1, 8), F(5, 8)):
        tp = tate_point(u, None, p, 12)
        got = (tp.xx.valuation(), tp.yy.valuation())
        assert all(v.known for v in got)
        assert (got[0].value, got[1].value) == point_valuations(cp, u)
        assert point_valuations(cp, u) == cycle_point(cp, u)
