from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tropedwards.errors import NoCycle, UnknownCoefficientValuation
from tropedwards.series import AtLeast, Known
from tropedwards.tropcurve import (
    TABLE1,
    U_ORDER,
    TropPolynomial,
    classify_u,
    cycle_measure,
    lattice_length,
    polygon_area,
    primitive,
    regular_subdivision,
    subdivision_smoothness,
    table1_smoothness,
    trop_eval,
    tropical_curve,
)

u_vectors = st.fixed_dictionaries(
    {k: st.fractions(min_value=-8, max_value=8, max_denominator=3) for k in U_ORDER}
)

SQUARE_U = {"u12": 1, "u34": 3, "u5": 0, "u67": 1, "u8": 3}


@given(u_vectors)
def test_balancing_and_duality(u):
    curve = tropical_curve(TropPolynomial.from_u(u))
    assert curve.is_balanced()
    # boundary lattice length of the Newton pentagon
    assert sum(r.weight for r in curve.rays) == 7
    sub = curve.subdivision
    assert len(curve.vertices) == len(sub.cells)
    assert sum(c.area() for c in sub.cells) == F(7, 2)
    assert curve.betti_number() <= 1


@given(u_vectors)
def test_vertices_and_edges_are_tropical_ties(u):
    f = TropPolynomial.from_u(u)
    curve = tropical_curve(f)
    for k, v in enumerate(curve.vertices):
        _, arg = trop_eval(f, *v)
        assert len(arg) >= 3
    for e in curve.edges:
        a, b = curve.vertices[e.start], curve.vertices[e.end]
        mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
        _, arg = trop_eval(f, *mid)
        assert len(arg) >= 2
    for r in curve.rays:
        o = curve.vertices[r.at]
        p = (o[0] + r.direction[0], o[1] + r.direction[1])
        _, arg = trop_eval(f, *p)
        assert len(arg) >= 2
        assert curve.contains(*p)


@given(u_vectors, st.fractions(min_value=-9, max_value=9, max_denominator=7), st.fractions(min_value=-9, max_value=9, max_denominator=7))
def test_membership_agrees_with_argmin(u, x, y):
    f = TropPolynomial.from_u(u)
    curve = tropical_curve(f)
    _, arg = trop_eval(f, x, y)
    assert curve.contains(x, y) == (len(arg) >= 2)


@given(u_vectors)
def test_smoothness_checkers_agree(u):
    f = TropPolynomial.from_u(u)
    curve = tropical_curve(f)
    try:
        m = cycle_measure(curve)
    except NoCycle:
        return
    assert m.kind in TABLE1
    assert table1_smoothness(f, m.kind) == subdivision_smoothness(curve.subdivision)


def test_square_example():
    f = TropPolynomial.from_u(SQUARE_U)
    curve = tropical_curve(f)
    m = cycle_measure(curve)
    assert m.kind == "Square"
    assert m.lattice_length == 8
    assert table1_smoothness(f, "Square")
    sub = regular_subdivision(f)
    assert len(sub.cells) == 7
    assert all(len(c.corners) == 3 and c.area() == F(1, 2) for c in sub.cells)
    assert subdivision_smoothness(sub)


def test_unknown_corner_coefficient_is_refused():
    u = dict(SQUARE_U, u34=AtLeast(3), u8=AtLeast(3))
    with pytest.raises(UnknownCoefficientValuation):
        tropical_curve(TropPolynomial.from_u(u))


def test_interior_lower_bound_above_hull_is_dropped():
    curve = tropical_curve(TropPolynomial.from_u(dict(SQUARE_U, u5=AtLeast(10))))
    assert curve.betti_number() == 0
    with pytest.raises(NoCycle):
        cycle_measure(curve)


def test_classify_heptagon():
    hept = classify_u({"u12": 1, "u34": 2, "u5": 0, "u67": F(3, 2), "u8": 2}, F(3, 2))
    assert (hept.polygon_kind, hept.lattice_length, hept.smooth) == ("Heptagon", 8, True)


def test_non_smooth_pentagon():
    # delta = 2 with r = 1 + q^2, s = -1 + q^2
    from tropedwards.edwards import FamilyParams
    from tropedwards.expr import parse_series
    from tropedwards.tropcurve import classify

    rep = classify(FamilyParams(parse_series("1+q^2"), parse_series("-1+q^2")))
    assert (rep.polygon_kind, rep.lattice_length) == ("Pentagon", 8)
    assert rep.smooth_by_table1 is False and rep.smooth_by_subdivision is False


def test_too_few_known_coefficients():
    with pytest.raises(UnknownCoefficientValuation):
        TropPolynomial.from_u({"u12": AtLeast(1), "u34": AtLeast(1), "u5": Known(0), "u67": AtLeast(1), "u8": Known(1)})


def test_lattice_helpers():
    assert primitive((4, -6)) == (2, -3)
    assert lattice_length((4, -6)) == 2
    assert lattice_length((F(1, 2), F(1, 2))) == F(1, 2)
    assert polygon_area([(0, 0), (1, 0), (0, 1)]) == F(1, 2)
