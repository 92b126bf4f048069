from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from nonarch._exact import (INFINITY, Enclosure, Q, affine_rank, det, fmt, nullspace, parse,
                            rank, rref, solve)

ints = st.integers(-5, 5)
matrices = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(ints, min_size=n, max_size=n), min_size=n, max_size=n))


def test_rational_coercion():
    assert Q("1/3") == Fraction(1, 3)
    assert Q(2) == 2
    assert Q(2.0) == 2
    for bad in (0.1, 0.5):
        with pytest.raises(TypeError):
            Q(bad)


def test_format_round_trip():
    for x in (Fraction(0), Fraction(-7, 3), Fraction(5)):
        assert parse(fmt(x)) == x
    assert fmt(Fraction(5)) == "5"
    assert fmt(Fraction(-1, 3)) == "-1/3"
    assert fmt(INFINITY) == "inf" and parse("inf") is INFINITY


def test_infinity_orders_above_everything():
    assert INFINITY > 10**100 and Fraction(1, 3) < INFINITY
    assert min([INFINITY, Fraction(2)]) == 2
    assert INFINITY == INFINITY


def test_enclosure():
    e = Enclosure(Fraction(1), Fraction(2))
    assert Fraction(3, 2) in e and 3 not in e
    assert e.width == 1 and not e.exact
    assert Enclosure(Fraction(1, 3), Fraction(1, 3)).exact
    with pytest.raises(ValueError):
        Enclosure(Fraction(2), Fraction(1))


@given(matrices)
def test_det_and_rank_match_sympy(rows):
    M = sp.Matrix(rows)
    A = [[Fraction(x) for x in r] for r in rows]
    assert det(A) == M.det()
    assert rank(A) == M.rank()


@given(matrices, st.lists(ints, min_size=4, max_size=4))
def test_solve_and_nullspace(rows, rhs):
    A = [[Fraction(x) for x in r] for r in rows]
    n = len(A)
    b = [Fraction(x) for x in rhs[:n]]
    if det(A) != 0:
        x = solve(A, b)
        assert [sum(A[i][j] * x[j] for j in range(n)) for i in range(n)] == b
    else:
        with pytest.raises(ZeroDivisionError):
            solve(A, b)
    ker = nullspace(A, n)
    assert len(ker) == n - rank(A)
    for k in ker:
        assert all(sum(A[i][j] * k[j] for j in range(n)) == 0 for i in range(n))


def test_rref_pivots():
    red, piv = rref([[Fraction(0), Fraction(2)], [Fraction(1), Fraction(1)]])
    assert piv == [0, 1]
    assert red == [[1, 0], [0, 1]]


def test_affine_rank():
    pts = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(1)), (Fraction(2), Fraction(2))]
    assert affine_rank(pts) == 1
