"""Hypothesis strategies shared by the test modules."""

from fractions import Fraction

from hypothesis import strategies as st

from nonarch.fdnorm import FiniteDimNorm
from nonarch.polytope import AffinePiece, ConcavePLFunction, RationalPolytope

UNIT = RationalPolytope.interval(0, 1)
SQUARE = RationalPolytope.unit_cube(2)
TRIANGLE = RationalPolytope.standard_simplex(2)

rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))
small_rationals = st.builds(Fraction, st.integers(-3, 3), st.integers(1, 3))
polytopes = st.sampled_from([UNIT, SQUARE, TRIANGLE])


@st.composite
def pl_functions(draw, P=None, max_pieces=4):
    P = P if P is not None else draw(polytopes)
    k = draw(st.integers(1, max_pieces))
    pieces = tuple(AffinePiece(tuple(draw(rationals) for _ in range(P.dim)), draw(rationals))
                   for _ in range(k))
    return ConcavePLFunction(P, pieces)


@st.composite
def fd_norms(draw, n, with_basis=True):
    values = tuple(draw(small_rationals) for _ in range(n))
    if not with_basis or draw(st.booleans()) is False:
        return FiniteDimNorm(values)
    # unitriangular times permutation keeps the basis invertible
    perm = draw(st.permutations(range(n)))
    cols = []
    for i in range(n):
        col = [Fraction(0)] * n
        col[perm[i]] = Fraction(1)
        for j in range(i):
            col[perm[j]] = Fraction(draw(st.integers(-2, 2)))
        cols.append(tuple(col))
    return FiniteDimNorm(values, tuple(cols))


@st.composite
def fd_pairs(draw, max_dim=6, count=2):
    n = draw(st.integers(1, max_dim))
    return tuple(draw(fd_norms(n)) for _ in range(count))
