from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from nonarch._exact import dot
from nonarch.polytope import (AffinePiece, ConcavePLFunction, ConvexPLFunction, PolytopeError,
                              RationalPolytope, active_cells, barycenter, biconjugate,
                              integrate_pl, lattice_points, legendre, support_function,
                              upper_hull, volume)

from oracles import legendre_lp
from strategies import SQUARE, TRIANGLE, UNIT, pl_functions, rationals

third = Fraction(1, 3)
g_min = ConcavePLFunction(UNIT, (AffinePiece((1,), 0), AffinePiece((0,), third)))
tent = ConcavePLFunction(UNIT, (AffinePiece((1,), 0), AffinePiece((-1,), 1)))


def test_volume_barycenter_examples():
    assert volume(TRIANGLE) == Fraction(1, 2) and barycenter(TRIANGLE) == (third, third)
    assert volume(SQUARE) == 1 and barycenter(SQUARE) == (Fraction(1, 2), Fraction(1, 2))
    assert volume(UNIT) == 1 and barycenter(UNIT) == (Fraction(1, 2),)
    cube = RationalPolytope.unit_cube(3)
    assert cube.volume == 1 and cube.barycenter == (Fraction(1, 2),) * 3


def test_hull_drops_interior_points():
    P = RationalPolytope.from_points([(0, 0), (2, 0), (0, 2), (1, 1), (Fraction(1, 2), Fraction(1, 2))])
    assert len(P.vertices) == 3
    assert P.volume == 2


def test_degenerate_polytopes_rejected():
    with pytest.raises(PolytopeError):
        RationalPolytope.from_points([(0, 0), (1, 1), (2, 2)])
    with pytest.raises(PolytopeError):
        RationalPolytope.from_points([(0,)])
    with pytest.raises(PolytopeError):
        RationalPolytope.unit_cube(4)


def test_lattice_point_examples(frozen):
    assert lattice_points(UNIT, 3) == [(0,), (1,), (2,), (3,)]
    assert len(lattice_points(SQUARE, 1)) == 4
    for m, count in frozen["simplex_lattice"].items():
        assert len(lattice_points(TRIANGLE, int(m))) == count
    pts = lattice_points(TRIANGLE, 2)
    assert pts == sorted(pts)


def test_legendre_example():
    G = legendre(g_min)
    assert [(p.slope, p.const) for p in G.pieces] == [((1,), third), ((third,), third), ((0,), 0)]


def test_legendre_matches_lp(frozen):
    G = legendre(g_min)
    for x, v in frozen["toric_min_third"]["legendre_at"].items():
        assert float(G((Fraction(x),))) == pytest.approx(float(v), abs=1e-12)


def test_legendre_of_zero_is_support_function():
    G = legendre(ConcavePLFunction.constant(SQUARE, 0))
    for xi in [(1, 0), (-1, 2), (Fraction(1, 3), Fraction(-5, 2))]:
        assert G(xi) == SQUARE.support(xi) == support_function(SQUARE)(xi)


def test_legendre_of_linear_is_shifted_support():
    xi0 = (Fraction(1, 2), -2)
    G = legendre(ConcavePLFunction.linear(TRIANGLE, xi0))
    for xi in [(1, 0), (-1, 2), (3, Fraction(1, 7))]:
        assert G(xi) == TRIANGLE.support(tuple(a + b for a, b in zip(xi, xi0)))


def test_biconjugate_examples():
    assert biconjugate(g_min) == g_min
    h = biconjugate([((0,), 0), ((Fraction(1, 2),), 1), ((1,), 0)], UNIT)
    assert sorted((p.slope, p.const) for p in h.pieces) == [((-2,), 2), ((2,), 0)]
    flat = biconjugate([((0,), 0), ((Fraction(1, 2),), -1), ((1,), 0)], UNIT)
    assert flat.pieces == (AffinePiece((0,), 0),)
    with pytest.raises(PolytopeError):
        biconjugate([((0, 0), 1), ((1, 1), 2)])


def test_integrate_examples(frozen):
    assert integrate_pl(UNIT, g_min) == Fraction(frozen["toric_min_third"]["volume"])
    assert integrate_pl(SQUARE, ConcavePLFunction.constant(SQUARE, 7)) == 7
    assert integrate_pl(TRIANGLE, ConcavePLFunction.constant(TRIANGLE, 2), normalized=True) == 2
    # tent of the d = 2 samples of a(1 - a)
    t = biconjugate([((0,), 0), ((Fraction(1, 2),), Fraction(1, 4)), ((1,), 0)], UNIT)
    assert integrate_pl(UNIT, t) == Fraction(frozen["approximant_bump"]["2"]["volume"])


def test_active_cell_examples(frozen):
    cells = {p.slope: c.vertices for p, c in active_cells(g_min)}
    assert cells == {(1,): ((0,), (third,)), (0,): ((third,), (1,))}
    one = active_cells(ConcavePLFunction.linear(SQUARE, (1, 2)))
    assert len(one) == 1 and one[0][1] == SQUARE
    brk = Fraction(frozen["toric_tent"]["cells_break"])
    assert sorted(c.vertices for _, c in active_cells(tent)) == [((0,), (brk,)), ((brk,), (1,))]


def test_redundant_pieces_dropped():
    g = ConcavePLFunction(UNIT, (AffinePiece((1,), 0), AffinePiece((1,), 5)))
    assert g.pieces == (AffinePiece((1,), 0),)
    g = ConcavePLFunction(UNIT, (AffinePiece((1,), 0), AffinePiece((0,), 5)))
    assert len(g.cells) == 1


def test_convex_function_irredundant():
    G = ConvexPLFunction((AffinePiece((0,), 0), AffinePiece((1,), 0), AffinePiece((Fraction(1, 2),), -1)))
    assert len(G.pieces) == 2
    assert G((2,)) == 2 and G((-1,)) == 0


def test_upper_hull_facets():
    facets = upper_hull([(0, 0), (1, 0), (0, 1), (1, 1)], [0, 1, 1, 0])
    assert len(facets) == 2


# -- properties -------------------------------------------------------------


@given(pl_functions())
def test_cells_partition_polytope(g):
    assert sum(c.volume for _, c in g.cells) == g.P.volume
    slopes = [p.slope for p in g.pieces]
    assert len(set(slopes)) == len(slopes)


@given(pl_functions(), st.lists(st.tuples(rationals, rationals), min_size=1, max_size=10))
def test_legendre_is_max_over_vertices(g, xis):
    G = legendre(g)
    for xi in xis:
        xi = xi[: g.P.dim]
        assert G(xi) == max(dot(v, xi) + y for v, y in g.vertex_values)


@given(pl_functions(P=SQUARE, max_pieces=3), st.tuples(rationals, rationals))
def test_legendre_matches_linear_program(g, xi):
    pieces = [(p.slope, p.const) for p in g.pieces]
    ref = legendre_lp(pieces, (0, 0), (1, 1), tuple(float(x) for x in xi))
    assert float(legendre(g)(xi)) == pytest.approx(ref, abs=1e-9)


@given(pl_functions())
def test_biconjugate_fixed_point(g):
    assert biconjugate(g) == g


@given(st.sampled_from([UNIT, SQUARE, TRIANGLE]), st.data())
def test_biconjugate_dominates_and_is_idempotent(P, data):
    pts = P.lattice_points(2)
    samples = [(tuple(Fraction(x, 2) for x in a), data.draw(rationals)) for a in pts]
    h = biconjugate(samples, P)
    assert all(h(a) >= y for a, y in samples)
    assert biconjugate(h) == h
    # touches the samples at the vertices of the hull
    assert any(h(a) == y for a, y in samples)


@given(pl_functions(), pl_functions())
def test_integral_additive_and_monotone(g, h):
    if g.P != h.P:
        return
    m = g.minimum(h)
    total = sum((c.volume * p(c.barycenter) for p, c in m.cells), Fraction(0))
    assert integrate_pl(m.P, m) == total
    assert integrate_pl(m.P, m) <= min(integrate_pl(g.P, g), integrate_pl(h.P, h))
    assert integrate_pl(g.P, g + 1) == integrate_pl(g.P, g) + g.P.volume


@settings(max_examples=15)
@given(pl_functions(P=SQUARE, max_pieces=3))
def test_integral_matches_quadrature(g):
    fl = [(float(p.slope[0]), float(p.slope[1]), float(p.const)) for p in g.pieces]
    f = lambda y, x: min(a * x + b * y + c for a, b, c in fl)  # noqa: E731
    ref, _ = integrate.dblquad(f, 0, 1, 0, 1, epsabs=1e-10)
    assert float(integrate_pl(SQUARE, g)) == pytest.approx(ref, abs=1e-6)


def test_polytope_clip_and_intersect():
    half = SQUARE.clip((1, 0), Fraction(1, 2))
    assert half.volume == Fraction(1, 2)
    assert SQUARE.clip((1, 0), -1) is None
    assert SQUARE.intersect(TRIANGLE).volume == Fraction(1, 2)
