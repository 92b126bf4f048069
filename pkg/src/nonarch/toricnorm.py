"""Toric norms on section rings of polarized toric varieties.

A homogeneous toric norm is a bounded concave function ``g`` on the moment
polytope ``P``; a general toric norm (before homogenization) is a
superadditive table ``h(m, alpha)`` on the lattice points of the dilates
``mP``. This module evaluates metrics, volumes, spectral and Monge-Ampere
measures, Fubini-Study values, canonical approximants and the finite-type
and divisorial predicates in terms of that data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from ._exact import INFINITY, Enclosure, Q, dot, qvec
from .errors import CarrierMismatchError, UnsupportedModeError
from .fdnorm import FiniteDimNorm
from .measures import DiscreteMeasure, MeasureError, PLMeasure1D
from .polytope import (AffinePiece, ConcavePLFunction, ConvexPLFunction, PolytopeError,
                       RationalPolytope, affine_pushforward_ramps, biconjugate,
                       integrate_abs_power, integrate_pl, legendre, refine)
from .sampled import (SampledConcave, diff_power_enclosure, empirical_measure,
                      exact_diff_power, integral_enclosure, max_enclosure)

Concave = Union[ConcavePLFunction, SampledConcave]


@dataclass(frozen=True)
class ToricHomNorm:
    """Homogeneous toric norm: concave data ``g`` on the carrier ``P``."""

    g: Concave

    def __post_init__(self):
        if not isinstance(self.g, (ConcavePLFunction, SampledConcave)):
            raise TypeError("g must be a ConcavePLFunction or SampledConcave")

    @property
    def P(self) -> RationalPolytope:
        return self.g.P

    @property
    def is_pl(self) -> bool:
        return isinstance(self.g, ConcavePLFunction)

    @classmethod
    def trivial(cls, P: RationalPolytope) -> "ToricHomNorm":
        return cls(ConcavePLFunction.constant(P, 0))

    def __call__(self, alpha) -> Fraction:
        return self.g(alpha)

    def __add__(self, c) -> "ToricHomNorm":
        return ToricHomNorm(_pl(self) + Q(c))

    def scaled(self, t) -> "ToricHomNorm":
        return ToricHomNorm(_pl(self).scaled(t))

    def __eq__(self, other):
        if not isinstance(other, ToricHomNorm):
            return NotImplemented
        return self.g == other.g

    def __hash__(self):
        return hash(self.g)


def _pl(chi: ToricHomNorm) -> ConcavePLFunction:
    if not chi.is_pl:
        raise UnsupportedModeError("operation requires piecewise-linear (exact) data")
    return chi.g


def _same_carrier(chi: ToricHomNorm, chi2: ToricHomNorm):
    if chi.P != chi2.P:
        raise CarrierMismatchError("norms live on different polytopes")


# ---------------------------------------------------------------------------
# constructors


def from_valuation(P: RationalPolytope, xi: Sequence) -> ToricHomNorm:
    """Norm of the toric valuation ``xi``, normalized to have minimum 0 on P."""
    xi = qvec(xi)
    return ToricHomNorm(ConcavePLFunction(P, (AffinePiece(xi, -P.min_linear(xi)),)))


def divisorial_norm(P: RationalPolytope, pieces: Iterable[tuple[Sequence, object]]) -> ToricHomNorm:
    pieces = [AffinePiece(qvec(xi), Q(c)) for xi, c in pieces]
    if not pieces:
        raise ValueError("a divisorial norm needs at least one piece")
    return ToricHomNorm(ConcavePLFunction(P, tuple(pieces)))


def sampled_norm(P: RationalPolytope, pitch, values=None, poly=None) -> ToricHomNorm:
    if poly is not None:
        return ToricHomNorm(SampledConcave.from_polynomial(P, pitch, poly))
    return ToricHomNorm(SampledConcave(P, Q(pitch), tuple(values)))


def norm_min(chi: ToricHomNorm, chi2: ToricHomNorm) -> ToricHomNorm:
    """chi ^ chi2: concave data min(g, g')."""
    _same_carrier(chi, chi2)
    return ToricHomNorm(_pl(chi).minimum(_pl(chi2)))


# ---------------------------------------------------------------------------
# metrics and volumes


def _parse_p(p):
    if p is INFINITY or p == "inf" or (isinstance(p, float) and math.isinf(p)):
        return "inf"
    p = Fraction(p) if isinstance(p, float) else Q(p)
    if p < 1:
        raise ValueError(f"p must lie in [1, inf], got {p}")
    return p


def distance(chi: ToricHomNorm, chi2: ToricHomNorm, p=1):
    """d_p as the L^p(lambda_P) norm of g - g'.

    PL inputs give exact results: the value for p in {1, inf}, the p-th power
    for integer p >= 2, and a float d_p for non-integer p. Sampled inputs give
    an ``Enclosure`` of the same quantity.
    """
    _same_carrier(chi, chi2)
    p = _parse_p(p)
    if chi.is_pl and chi2.is_pl:
        return _pl_distance(chi.g, chi2.g, p)
    if p != "inf" and p.denominator != 1:
        raise UnsupportedModeError("sampled data supports integer p or p = inf")
    pp = p if p == "inf" else int(p)
    for a, b in ((chi.g, chi2.g), (chi2.g, chi.g)):
        if isinstance(a, SampledConcave) and isinstance(b, ConcavePLFunction):
            v = exact_diff_power(a, b, pp)
            if v is not None:
                return Enclosure(v, v)
    return diff_power_enclosure(chi.g, chi2.g, pp)


def _pl_distance(g: ConcavePLFunction, h: ConcavePLFunction, p):
    if p == "inf":
        best = Fraction(0)
        for cell, pg, ph in refine(g, h):
            for v in cell.vertices:
                best = max(best, abs(pg(v) - ph(v)))
        return best
    if p.denominator != 1:
        return _difference_measure(g, h).abs_moment_float(float(p)) ** (1 / float(p))
    k = int(p)
    total = Fraction(0)
    for cell, pg, ph in refine(g, h):
        diff = AffinePiece(tuple(a - b for a, b in zip(pg.slope, ph.slope)), pg.const - ph.const)
        total += integrate_abs_power(cell, diff, k)
    return total / g.P.volume


def volume(chi: ToricHomNorm):
    """Integral of g against normalized Lebesgue measure on P."""
    if chi.is_pl:
        return integrate_pl(chi.P, chi.g, normalized=True)
    return integral_enclosure(chi.g)


def lambda_max(chi: ToricHomNorm):
    if chi.is_pl:
        return chi.g.max_value
    return max_enclosure(chi.g)


def lambda_min(chi: ToricHomNorm) -> Fraction:
    return _pl(chi).min_value


# ---------------------------------------------------------------------------
# measures


def _pushforward(cells_and_pieces, vol_P: Fraction) -> PLMeasure1D:
    ramps, atoms = [], []
    for cell, f in cells_and_pieces:
        r, a = affine_pushforward_ramps(cell, f)
        ramps += [(lo, hi, tuple(c / vol_P for c in poly)) for lo, hi, poly in r]
        atoms += [(x, m / vol_P) for x, m in a]
    return PLMeasure1D.from_contributions(ramps, atoms)


def spectral_measure(chi: ToricHomNorm):
    """Limit spectral measure g_* lambda_P.

    Exact ``PLMeasure1D`` for PL data in dimension <= 2; the trapezoid
    empirical ``DiscreteMeasure`` of the grid values for sampled data.
    """
    if not chi.is_pl:
        return empirical_measure(chi.g)
    if chi.P.dim > 2:
        raise UnsupportedModeError("exact spectral measures need dimension <= 2")
    sigma = _pushforward(((c, p) for p, c in chi.g.cells), chi.P.volume)
    atoms = sigma.atoms()
    if any(t != sigma.support[1] for t in atoms):
        raise AssertionError("spectral measure of a concave function has an interior atom")
    return sigma


def _difference_measure(g: ConcavePLFunction, h: ConcavePLFunction) -> PLMeasure1D:
    def parts():
        for cell, pg, ph in refine(g, h):
            yield cell, AffinePiece(tuple(a - b for a, b in zip(pg.slope, ph.slope)),
                                    pg.const - ph.const)
    if g.P.dim > 2:
        raise UnsupportedModeError("exact pushforward measures need dimension <= 2")
    return _pushforward(parts(), g.P.volume)


def relative_spectral_measure(chi: ToricHomNorm, chi2: ToricHomNorm) -> PLMeasure1D:
    """Pushforward of lambda_P by g - g'."""
    _same_carrier(chi, chi2)
    return _difference_measure(_pl(chi), _pl(chi2))


def monge_ampere(chi: ToricHomNorm) -> DiscreteMeasure:
    """Atoms at the piece slopes, weighted by the normalized cell volumes."""
    g = _pl(chi)
    vol = chi.P.volume
    return DiscreteMeasure.from_pairs((p.slope, c.volume / vol) for p, c in g.cells)


# ---------------------------------------------------------------------------
# Fubini-Study side


def fs_at(chi: ToricHomNorm, xi: Sequence) -> Fraction:
    """sup_P (g - <xi, .>) + min_P <xi, .>; vanishes at the norm's own valuation."""
    xi = qvec(xi)
    g = _pl(chi)
    sup = max(y - dot(xi, v) for v, y in g.vertex_values)
    return sup + chi.P.min_linear(xi)


def fs_function(chi: ToricHomNorm) -> ConvexPLFunction:
    """Legendre transform g^vee (FS(chi) = g^vee - 0^vee on N_R)."""
    return legendre(_pl(chi))


# ---------------------------------------------------------------------------
# truncated (non-homogeneous) data


@dataclass(frozen=True)
class TruncatedToricNorm:
    """Superadditive table ``h(m, alpha)`` on lattice points of ``mP``.

    ``table`` maps each tabulated degree m (a multiple of ``d``) to a dict
    from integer points of mP to rationals.
    """

    P: RationalPolytope
    d: int
    table: Mapping[int, Mapping[tuple[int, ...], Fraction]]
    growth: Optional[Fraction] = None
    validate: bool = field(default=True, compare=False)

    def __post_init__(self):
        tab = {}
        for m in sorted(self.table):
            if m % self.d:
                raise ValueError(f"degree {m} is not a multiple of the base degree {self.d}")
            pts = self.P.lattice_points(m)
            row = {tuple(k): Q(v) for k, v in self.table[m].items()}
            if set(row) != set(pts):
                raise ValueError(f"degree {m} table must cover exactly the lattice points of {m}P")
            tab[m] = row
        object.__setattr__(self, "table", tab)
        if self.growth is None:
            object.__setattr__(self, "growth",
                               max((abs(v) / m for m, row in tab.items() for v in row.values()),
                                   default=Fraction(0)))
        else:
            object.__setattr__(self, "growth", Q(self.growth))
        if self.validate:
            self.check()

    @classmethod
    def from_function(cls, P: RationalPolytope, degrees: Iterable[int],
                      h: Callable[[int, tuple[int, ...]], object], d: Optional[int] = None,
                      **kw) -> "TruncatedToricNorm":
        degrees = sorted(set(degrees))
        if d is None:
            d = math.gcd(*degrees)
        table = {m: {a: Q(h(m, a)) for a in P.lattice_points(m)} for m in degrees}
        return cls(P, d, table, **kw)

    @classmethod
    def restriction(cls, chi: ToricHomNorm, degrees: Iterable[int], **kw) -> "TruncatedToricNorm":
        """h(m, alpha) = m g(alpha / m)."""
        return cls.from_function(
            chi.P, degrees, lambda m, a: m * chi.g(tuple(Fraction(x, m) for x in a)), **kw)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(sorted(self.table))

    def check(self):
        for m, row in self.table.items():
            for a, v in row.items():
                if abs(v) > self.growth * m:
                    raise ValueError(f"h({m},{a}) = {v} violates the linear growth bound")
        for m1 in self.degrees:
            for m2 in self.degrees:
                if m2 < m1 or m1 + m2 not in self.table:
                    continue
                top = self.table[m1 + m2]
                for a, va in self.table[m1].items():
                    for b, vb in self.table[m2].items():
                        s = tuple(x + y for x, y in zip(a, b))
                        if top[s] < va + vb:
                            raise ValueError(
                                f"superadditivity fails: h({m1 + m2},{s}) < h({m1},{a}) + h({m2},{b})")

    def row(self, m: int) -> dict:
        if m not in self.table:
            raise KeyError(f"degree {m} is not tabulated (have {self.degrees})")
        return self.table[m]

    def level_norm(self, m: int) -> FiniteDimNorm:
        """The norm on R_m, diagonal in the monomial basis (lattice points in lex order)."""
        row = self.row(m)
        return FiniteDimNorm.diagonal([row[a] for a in sorted(row)])


def spectral_measure_truncated(chi: TruncatedToricNorm, m: int) -> DiscreteMeasure:
    """(1/m)_* of the finite-level spectral measure at degree m."""
    row = chi.row(m)
    w = Fraction(1, len(row))
    return DiscreteMeasure.from_pairs((v / m, w) for v in row.values())


def round_down(chi: TruncatedToricNorm) -> TruncatedToricNorm:
    table = {m: {a: Fraction(math.floor(v)) for a, v in row.items()} for m, row in chi.table.items()}
    return TruncatedToricNorm(chi.P, chi.d, table, growth=chi.growth + 1, validate=chi.validate)


def level_sup_gap(chi: TruncatedToricNorm, other: TruncatedToricNorm) -> dict[int, Fraction]:
    """d_inf between the two tables at each common degree (unscaled)."""
    return {m: max(abs(v - other.table[m][a]) for a, v in chi.table[m].items())
            for m in chi.degrees if m in other.table}


def generated_in_degree(chi: TruncatedToricNorm, d: int, max_multiple: int) -> TruncatedToricNorm:
    """The norm generated in degree d by the degree-d row, up to degree max_multiple*d.

    Dynamic program over lattice decompositions: the value at (kd, alpha)
    is the max of h(d, b_1) + ... + h(d, b_k) over b_1 + ... + b_k = alpha.
    """
    base = chi.row(d)
    table = {d: dict(base)}
    for k in range(2, max_multiple + 1):
        prev = table[(k - 1) * d]
        row = {}
        for a in chi.P.lattice_points(k * d):
            best = None
            for b, vb in base.items():
                rest = tuple(x - y for x, y in zip(a, b))
                if rest in prev:
                    v = prev[rest] + vb
                    if best is None or v > best:
                        best = v
            row[a] = best
        table[k * d] = row
    return TruncatedToricNorm(chi.P, d, table, validate=False)


def canonical_approximant(source: Union[ToricHomNorm, TruncatedToricNorm], d: int) -> ToricHomNorm:
    """Homogenized degree-d approximant: concave envelope of the scaled degree-d samples."""
    if d < 1:
        raise ValueError("degree must be positive")
    if isinstance(source, TruncatedToricNorm):
        row = source.row(d)
        samples = [(tuple(Fraction(x, d) for x in a), v / d) for a, v in row.items()]
        P = source.P
    else:
        P = source.P
        pts = P.lattice_points(d)
        samples = []
        for a in pts:
            alpha = tuple(Fraction(x, d) for x in a)
            samples.append((alpha, source.g(alpha)))
    try:
        return ToricHomNorm(biconjugate(samples, P))
    except PolytopeError as exc:
        raise PolytopeError(f"degree {d} samples do not span P (degree not divisible enough)") from exc


# ---------------------------------------------------------------------------
# predicates


@dataclass(frozen=True)
class TypeCertificate:
    holds: bool
    pieces: tuple[AffinePiece, ...] = ()
    reason: str = ""


def is_finite_type(chi: ToricHomNorm) -> TypeCertificate:
    """Finite type iff g^vee is a finite max of affine functions with slopes in P
    and rational constants; the certificate lists those pieces."""
    if not chi.is_pl:
        return TypeCertificate(False, (), "not PL")
    G = legendre(chi.g)
    ok = all(chi.P.contains(p.slope) for p in G.pieces)
    return TypeCertificate(ok, G.pieces, "" if ok else "slope outside P")


def is_divisorial(chi: ToricHomNorm) -> TypeCertificate:
    """Divisorial iff g is a finite min of affine functions with rational data."""
    if not chi.is_pl:
        return TypeCertificate(False, (), "not PL")
    return TypeCertificate(True, chi.g.pieces, "")


# ---------------------------------------------------------------------------
# translation quotient


@dataclass(frozen=True)
class QuotientResult:
    value: Fraction
    shift: Fraction
    exact: bool


def quotient_d1(chi: ToricHomNorm, chi2: ToricHomNorm) -> QuotientResult:
    """inf_c of ||g - g' + c||_{L^1(lambda_P)}, attained at c = -median(g - g').

    When the median is irrational (quadratic CDF pieces in dimension 2), the
    shift is a rational within 1e-30 of it and ``value`` is the exact L^1
    distance at that shift; ``exact`` is False in that case.
    """
    _same_carrier(chi, chi2)
    g, h = _pl(chi), _pl(chi2)
    sigma = _difference_measure(g, h)
    med = sigma.median()
    exact = not isinstance(med, Enclosure)
    c = -(med if exact else med.mid)
    value = _pl_distance(g + c, h, Fraction(1))
    bound = 2 * _pl_distance(g, h, Fraction(1))
    if exact and abs(c) > bound:
        raise AssertionError("translation minimizer exceeds 2 d_1")
    return QuotientResult(value, c, exact)


def restriction_norm(chi: ToricHomNorm, m: int) -> FiniteDimNorm:
    """The restriction of chi to R_m: diagonal with values m g(alpha/m)."""
    pts = chi.P.lattice_points(m)
    return FiniteDimNorm.diagonal([m * chi.g(tuple(Fraction(x, m) for x in a)) for a in pts])


__all__ = [
    "ToricHomNorm", "TruncatedToricNorm", "TypeCertificate", "QuotientResult",
    "from_valuation", "divisorial_norm", "sampled_norm", "norm_min", "distance", "volume",
    "lambda_max", "lambda_min", "spectral_measure", "relative_spectral_measure",
    "spectral_measure_truncated", "monge_ampere", "fs_at", "fs_function",
    "canonical_approximant", "generated_in_degree", "round_down", "level_sup_gap",
    "is_finite_type", "is_divisorial", "quotient_d1", "restriction_norm", "MeasureError",
]
