from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from nonarch import fdnorm
from nonarch.errors import CarrierMismatchError, UnsupportedModeError
from nonarch.measures import DiscreteMeasure
from nonarch.polytope import biconjugate
from nonarch.toricnorm import (ToricHomNorm, TruncatedToricNorm, canonical_approximant,
                               distance, divisorial_norm, from_valuation, fs_at, fs_function,
                               generated_in_degree, is_divisorial, is_finite_type,
                               lambda_max, lambda_min, level_sup_gap, monge_ampere, norm_min,
                               quotient_d1, relative_spectral_measure, restriction_norm,
                               round_down, sampled_norm, spectral_measure,
                               spectral_measure_truncated, volume)

from strategies import SQUARE, TRIANGLE, UNIT, pl_functions, polytopes, rationals, small_rationals

third = Fraction(1, 3)
triv = ToricHomNorm.trivial(UNIT)
lin2 = from_valuation(UNIT, (2,))
gmin = divisorial_norm(UNIT, [((1,), 0), ((0,), third)])
tent = divisorial_norm(UNIT, [((1,), 0), ((-1,), 1)])
bump = sampled_norm(UNIT, Fraction(1, 8), poly=(0, 1, -1))


def nonneg_norms():
    return pl_functions().map(lambda g: ToricHomNorm(g + (-g.min_value)))


# -- constructors ----------------------------------------------------------


def test_from_valuation_examples(frozen):
    assert lin2((Fraction(1, 2),)) == 1 and lin2((0,)) == 0
    assert from_valuation(UNIT, (0,)) == triv
    sq = from_valuation(SQUARE, (1, 1))
    assert sq((1, 1)) == 2
    assert volume(sq) == Fraction(frozen["square_valuation_11"]["volume"])
    # negative slope is normalized to minimum 0
    assert from_valuation(UNIT, (-3,))((1,)) == 0


def test_divisorial_examples():
    assert gmin((Fraction(1, 5),)) == Fraction(1, 5) and gmin((1,)) == third
    single = divisorial_norm(UNIT, [((2,), 7)])
    assert single == lin2 + 7
    red = divisorial_norm(UNIT, [((1,), 0), ((1,), 5)])
    assert len(red.g.cells) == 1
    with pytest.raises(ValueError):
        divisorial_norm(UNIT, [])


# -- distances and volumes ------------------------------------------------


def test_distance_examples(frozen):
    ref = frozen["toric_linear_2a"]
    assert distance(lin2, triv, 1) == Fraction(ref["d1"])
    assert distance(lin2, triv, "inf") == Fraction(ref["dinf"])
    assert distance(lin2, triv, 2) == Fraction(ref["d2_power"])
    assert distance(gmin, triv, 1) == Fraction(frozen["toric_min_third"]["d1_trivial"])
    for chi in (triv, lin2, gmin, tent):
        for p in (1, 2, 3, "inf"):
            assert distance(chi, chi, p) == 0


def test_non_integer_p_is_float():
    assert distance(lin2, triv, 1.5) == pytest.approx((2 ** 1.5 / 2.5) ** (1 / 1.5))


def test_carrier_mismatch():
    with pytest.raises(CarrierMismatchError):
        distance(triv, ToricHomNorm.trivial(SQUARE))
    with pytest.raises(CarrierMismatchError):
        quotient_d1(triv, ToricHomNorm.trivial(TRIANGLE))


def test_volume_and_extremes(frozen):
    ref = frozen["toric_min_third"]
    assert volume(gmin) == Fraction(ref["volume"]) and lambda_max(gmin) == Fraction(ref["lambda_max"])
    assert volume(triv) == 0 and lambda_max(triv) == 0
    assert volume(lin2) == 1 and lambda_max(lin2) == 2
    assert lambda_min(lin2) == 0


def test_sampled_distance_and_volume(frozen):
    exact = distance(bump, canonical_approximant(bump, 2), 1)
    assert exact.exact and exact.lo == Fraction(frozen["approximant_bump"]["2"]["d1"])
    grid = sampled_norm(UNIT, Fraction(1, 16), [Fraction(i * (16 - i), 256) for i in range(17)])
    assert Fraction(frozen["bump_volume"]) in volume(grid)
    assert Fraction(1, 4) in lambda_max(grid)
    assert Fraction(1, 6) in distance(grid, triv, 1)
    with pytest.raises(UnsupportedModeError):
        distance(grid, triv, 1.5)
    with pytest.raises(UnsupportedModeError):
        lambda_min(grid)


# -- measures ---------------------------------------------------------------


def test_spectral_measure_examples(frozen):
    sigma = spectral_measure(lin2)
    assert sigma.support == (0, 2) and sigma.atoms() == {}
    assert sigma.cdf(Fraction(1, 2)) == Fraction(frozen["toric_linear_2a"]["cdf_at_1_2"])
    assert spectral_measure(triv + 3).atoms() == {3: 1}
    s = spectral_measure(gmin)
    ref = frozen["toric_min_third"]
    assert s.atoms() == {third: Fraction(2, 3)}
    assert s.cdf(Fraction(1, 6)) == Fraction(ref["sublevel_at_1_6"])
    assert s.cdf(third - Fraction(1, 10**6)) == Fraction(ref["sublevel_below_top"])


@given(pl_functions())
def test_spectral_measure_mean_is_volume_and_atom_on_top(g):
    chi = ToricHomNorm(g)
    sigma = spectral_measure(chi)
    assert sigma.mean() == volume(chi)
    assert sigma.support[1] == lambda_max(chi)
    assert all(t == lambda_max(chi) for t in sigma.atoms())


@given(pl_functions(), pl_functions())
def test_relative_measure_barycenter(g, h):
    if g.P != h.P:
        return
    a, b = ToricHomNorm(g), ToricHomNorm(h)
    sigma = relative_spectral_measure(a, b)
    assert sigma.mean() == volume(a) - volume(b)
    assert sigma.abs_moment(1) == distance(a, b, 1)
    assert sigma.abs_moment(2) == distance(a, b, 2)


def test_spectral_measure_needs_low_dimension():
    from nonarch.polytope import RationalPolytope
    with pytest.raises(UnsupportedModeError):
        spectral_measure(ToricHomNorm.trivial(RationalPolytope.unit_cube(3)))


def test_sampled_spectral_measure_is_empirical():
    mu = spectral_measure(sampled_norm(UNIT, Fraction(1, 2), [0, Fraction(1, 4), 0]))
    assert isinstance(mu, DiscreteMeasure) and mu.barycenter() == Fraction(1, 8)


def test_monge_ampere_examples():
    assert monge_ampere(gmin) == DiscreteMeasure.from_pairs([((1,), third), ((0,), 2 * third)])
    assert monge_ampere(lin2) == DiscreteMeasure.dirac((2,))
    assert monge_ampere(tent) == DiscreteMeasure.from_pairs([((1,), Fraction(1, 2)), ((-1,), Fraction(1, 2))])


@given(pl_functions(), small_rationals, st.integers(1, 4))
def test_monge_ampere_rules(g, c, t):
    chi = ToricHomNorm(g)
    mu = monge_ampere(chi)
    assert sum(mu.masses) == 1
    assert monge_ampere(chi + c) == mu
    assert monge_ampere(chi.scaled(t)) == mu.scale(t)


# -- truncated data ----------------------------------------------------------


def subvariety(m, a):
    return m if a[0] >= 1 else 0


def test_truncated_spectral_examples(frozen):
    sub = TruncatedToricNorm.from_function(UNIT, [1, 2, 3], subvariety)
    assert spectral_measure_truncated(sub, 3) == DiscreteMeasure.from_pairs(
        [(0, Fraction(1, 4)), (1, Fraction(3, 4))])
    assert spectral_measure_truncated(sub, 3).wasserstein1(DiscreteMeasure.dirac(1)) == Fraction(
        frozen["subvariety_w1"]["3"])
    zero = TruncatedToricNorm.from_function(SQUARE, [1, 2], lambda m, a: 0)
    assert spectral_measure_truncated(zero, 2) == DiscreteMeasure.dirac(0)
    r = TruncatedToricNorm.restriction(lin2, [1, 2])
    assert spectral_measure_truncated(r, 2) == DiscreteMeasure.uniform([0, 1, 2])
    with pytest.raises(KeyError):
        spectral_measure_truncated(r, 5)


def test_truncated_validation():
    with pytest.raises(ValueError, match="superadditivity"):
        TruncatedToricNorm.from_function(UNIT, [1, 2], lambda m, a: 1 if m == 1 else 0)
    with pytest.raises(ValueError, match="growth"):
        TruncatedToricNorm.from_function(UNIT, [1], lambda m, a: 5, growth=1)
    with pytest.raises(ValueError, match="lattice points"):
        TruncatedToricNorm(UNIT, 1, {1: {(0,): 0}})
    with pytest.raises(ValueError, match="multiple"):
        TruncatedToricNorm(UNIT, 2, {3: {(k,): 0 for k in range(4)}})


@given(pl_functions(P=UNIT), st.integers(1, 4))
def test_restriction_tables_are_superadditive(g, d):
    TruncatedToricNorm.restriction(ToricHomNorm(g), [d, 2 * d, 4 * d])


def test_round_down_examples():
    integer = TruncatedToricNorm.from_function(UNIT, [1, 2], lambda m, a: a[0])
    assert round_down(integer).table == integer.table
    third_table = TruncatedToricNorm.from_function(UNIT, [1, 2, 3, 6], lambda m, a: Fraction(m * a[0], 3))
    low = round_down(third_table)
    assert all(v.denominator == 1 for row in low.table.values() for v in row.values())
    assert all(gap < 1 for gap in level_sup_gap(third_table, low).values())
    half = TruncatedToricNorm.from_function(UNIT, [1], lambda m, a: Fraction(1, 2))
    assert set(round_down(half).row(1).values()) == {0}


@given(pl_functions(P=UNIT))
def test_round_down_gap_below_one(g):
    t = TruncatedToricNorm.restriction(ToricHomNorm(g), [1, 2, 4])
    assert all(0 <= gap < 1 for gap in level_sup_gap(t, round_down(t)).values())


# -- Fubini-Study side -------------------------------------------------------


@given(polytopes, st.data())
def test_fs_vanishes_at_own_valuation(P, data):
    xi = tuple(data.draw(rationals) for _ in range(P.dim))
    assert fs_at(from_valuation(P, xi), xi) == 0


@given(pl_functions())
def test_fs_at_zero_is_lambda_max(g):
    chi = ToricHomNorm(g)
    assert fs_at(chi, (0,) * g.P.dim) == lambda_max(chi)


def test_fs_examples():
    assert fs_at(lin2, (0,)) == 2
    G = fs_function(gmin)
    assert [(p.slope, p.const) for p in G.pieces] == [((1,), third), ((third,), third), ((0,), 0)]


@given(polytopes, st.data())
def test_dinfty_is_max_of_fs_values(P, data):
    v = tuple(data.draw(rationals) for _ in range(P.dim))
    w = tuple(data.draw(rationals) for _ in range(P.dim))
    cv, cw = from_valuation(P, v), from_valuation(P, w)
    assert distance(cv, cw, "inf") == max(fs_at(cv, w), fs_at(cw, v))


# -- identities ----------------------------------------------------------------


@given(pl_functions(), pl_functions())
def test_d1_volume_identity(g, h):
    if g.P != h.P:
        return
    a, b = ToricHomNorm(g), ToricHomNorm(h)
    # Darvas form: E(a) + E(b) - 2 E(a ^ b), with E the volume
    assert distance(a, b, 1) == volume(a) + volume(b) - 2 * volume(norm_min(a, b))


@given(pl_functions(), pl_functions(), pl_functions())
def test_metric_axioms(f, g, h):
    if not f.P == g.P == h.P:
        return
    a, b, c = ToricHomNorm(f), ToricHomNorm(g), ToricHomNorm(h)
    for p in (1, "inf"):
        assert distance(a, b, p) == distance(b, a, p)
        assert distance(a, c, p) <= distance(a, b, p) + distance(b, c, p)
    d1, dinf = distance(a, b, 1), distance(a, b, "inf")
    assert d1 ** 2 <= distance(a, b, 2) <= dinf ** 2


@given(nonneg_norms(), st.integers(1, 4))
def test_lambda_max_controlled_by_dp(chi, p):
    n = chi.P.dim
    dp = distance(chi, ToricHomNorm.trivial(chi.P), p)
    assert lambda_max(chi) ** p <= comb(n + p, n) * dp


@given(st.builds(Fraction, st.integers(0, 8), st.integers(1, 3)))
def test_lambda_max_bound_sharp_for_linear(a):
    chi = from_valuation(UNIT, (a,))
    assert lambda_max(chi) == comb(2, 1) * distance(chi, triv, 1)


@pytest.mark.parametrize("chi, chi2", [(lin2, triv), (gmin, tent), (tent, lin2 + third)])
def test_restriction_compatibility(chi, chi2):
    dinf = distance(chi, chi2, "inf")
    d1 = distance(chi, chi2, 1)
    prev = None
    for m in (1, 2, 4, 8, 16, 32, 64):
        a, b = restriction_norm(chi, m), restriction_norm(chi2, m)
        level = fdnorm.distance(a, b, "inf") / m
        assert level <= dinf
        if prev is not None:
            assert level >= prev
        prev = level
    assert abs(float(fdnorm.distance(a, b, 1) / 64 - d1)) < 1e-2


# -- approximants ---------------------------------------------------------------


def test_canonical_approximant_examples(frozen):
    t2 = canonical_approximant(bump, 2)
    assert t2 == divisorial_norm(UNIT, [((Fraction(1, 2),), 0), ((Fraction(-1, 2),), Fraction(1, 2))])
    assert volume(t2) == Fraction(frozen["approximant_bump"]["2"]["volume"])
    t4 = canonical_approximant(bump, 4)
    assert volume(t4) == Fraction(frozen["approximant_bump"]["4"]["volume"])
    assert Fraction(1, 6) - volume(t4) < Fraction(1, 6) - volume(t2)
    assert canonical_approximant(gmin, 3) == gmin
    assert canonical_approximant(tent, 2) == tent


def test_canonical_approximant_convergence(frozen):
    for d in (2, 4, 8, 16, 32, 64):
        gd = canonical_approximant(bump, d)
        ref = frozen["approximant_bump"][str(d)]
        assert distance(bump, gd, 1).lo == Fraction(ref["d1"])


def test_canonical_approximant_of_table():
    r = TruncatedToricNorm.restriction(gmin, [3, 6])
    assert canonical_approximant(r, 3) == gmin
    with pytest.raises(KeyError):
        canonical_approximant(r, 4)
    with pytest.raises(ValueError):
        canonical_approximant(gmin, 0)


@settings(max_examples=25)
@given(pl_functions(P=UNIT), st.integers(1, 3))
def test_approximants_increase_along_divisibility(g, d):
    chi = ToricHomNorm(g)
    gd, g2d = canonical_approximant(chi, d), canonical_approximant(chi, 2 * d)
    for k in range(4 * d + 1):
        x = (Fraction(k, 4 * d),)
        assert gd(x) <= g2d(x) <= chi(x)


@given(pl_functions())
def test_biconjugate_is_identity_on_norms(g):
    assert biconjugate(g) == g


@settings(max_examples=25)
@given(st.sampled_from([UNIT, SQUARE]), st.data(), st.sampled_from([1, 2]))
def test_generated_table_dominated_by_envelope(P, data, d):
    base = {a: data.draw(st.integers(-3, 3)) for a in P.lattice_points(1)}
    h1 = TruncatedToricNorm(P, 1, {1: base})
    gen = generated_in_degree(h1, 1, 2 * d)
    gen.check()
    env = canonical_approximant(gen, d)
    for m in gen.degrees:
        if m % d:
            continue
        for a, v in gen.row(m).items():
            assert env(tuple(Fraction(x, m) for x in a)) >= v / m


# -- predicates and quotient ---------------------------------------------------


def test_finite_type_examples():
    cert = is_finite_type(gmin)
    assert cert.holds and sorted(p.slope[0] for p in cert.pieces) == [0, third, 1]
    assert is_finite_type(triv).holds
    s = is_finite_type(bump)
    assert not s.holds and s.reason == "not PL"
    assert is_divisorial(gmin).holds and not is_divisorial(bump).holds


@given(pl_functions())
def test_rational_pl_is_finite_type(g):
    cert = is_finite_type(ToricHomNorm(g))
    assert cert.holds and all(g.P.contains(p.slope) for p in cert.pieces)


def test_quotient_examples(frozen):
    ref = frozen["toric_linear_2a"]
    q = quotient_d1(lin2, triv)
    assert (q.value, q.shift, q.exact) == (Fraction(ref["quotient_value"]), Fraction(ref["quotient_shift"]), True)
    q = quotient_d1(gmin, gmin + 5)
    assert q.value == 0 and q.shift == 5
    q = quotient_d1(gmin, triv)
    assert q.value == Fraction(frozen["toric_min_third"]["quotient_value"]) and q.shift == -third


def test_quotient_irrational_median():
    # a + b on the triangle has a quadratic CDF and an irrational median
    q = quotient_d1(from_valuation(TRIANGLE, (1, 1)), ToricHomNorm.trivial(TRIANGLE))
    assert not q.exact
    # CDF t^2 on [0, 1], so the shift is -sqrt(1/2)
    assert q.shift < 0 and abs(q.shift ** 2 - Fraction(1, 2)) < Fraction(1, 10**25)
    assert q.value <= distance(from_valuation(TRIANGLE, (1, 1)), ToricHomNorm.trivial(TRIANGLE), 1)


@given(pl_functions(), pl_functions())
def test_quotient_shift_bounded(g, h):
    if g.P != h.P:
        return
    a, b = ToricHomNorm(g), ToricHomNorm(h)
    q = quotient_d1(a, b)
    d1 = distance(a, b, 1)
    assert q.value <= d1
    if q.exact:
        assert abs(q.shift) <= 2 * d1
        for c in (q.shift + Fraction(1, 7), q.shift - Fraction(1, 7)):
            assert distance(a + c, b, 1) >= q.value
