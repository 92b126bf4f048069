"""Concave functions on an interval known through grid samples.

Concavity gives two-sided affine bounds between consecutive grid points: the
chord from below and the extended neighbouring secants from above. All
integrals and suprema of sampled data are returned as rigorous rational
``Enclosure``s built from those bounds. When an exact polynomial (degree <= 3)
is attached, integrals that can be certified sign-definite are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from ._exact import Enclosure, Q
from .errors import UnsupportedModeError
from .measures import (DiscreteMeasure, _exact_sqrt, poly_add, poly_deriv, poly_eval,
                       poly_integrate, poly_pow, _trim)
from .polytope import ConcavePLFunction, RationalPolytope

Line = tuple[Fraction, Fraction]  # x -> s*x + c


def _line_at(l: Line, x: Fraction) -> Fraction:
    return l[0] * x + l[1]


def _through(x0, y0, x1, y1) -> Line:
    s = (y1 - y0) / (x1 - x0)
    return s, y0 - s * x0


@dataclass(frozen=True)
class SampledConcave:
    """Concave function on a 1-dimensional polytope, sampled on a uniform grid."""

    P: RationalPolytope
    pitch: Fraction
    values: tuple[Fraction, ...]
    poly: Optional[tuple[Fraction, ...]] = None

    def __post_init__(self):
        if self.P.dim != 1:
            raise UnsupportedModeError("sampled concave data is supported in dimension 1 only")
        pitch = Q(self.pitch)
        object.__setattr__(self, "pitch", pitch)
        object.__setattr__(self, "values", tuple(Q(v) for v in self.values))
        (a,), (b,) = self.P.vertices
        steps = (b - a) / pitch
        if pitch <= 0 or steps.denominator != 1:
            raise ValueError("grid pitch must divide the interval length")
        if steps < 2:
            raise ValueError("need at least three grid points")
        if len(self.values) != int(steps) + 1:
            raise ValueError(f"expected {int(steps) + 1} samples, got {len(self.values)}")
        v = self.values
        for k in range(1, len(v) - 1):
            if 2 * v[k] < v[k - 1] + v[k + 1]:
                raise ValueError(f"samples violate midpoint concavity at grid index {k}")
        if self.poly is not None:
            p = _trim(Q(c) for c in self.poly)
            object.__setattr__(self, "poly", p)
            if len(p) > 4:
                raise ValueError("attached polynomial must have degree <= 3")
            g2 = poly_deriv(poly_deriv(p))
            if any(poly_eval(g2, x) > 0 for x in (a, b)):
                raise ValueError("attached polynomial is not concave on the interval")
            if any(poly_eval(p, x) != y for x, y in zip(self.grid, v)):
                raise ValueError("samples disagree with the attached polynomial")

    @classmethod
    def from_function(cls, P: RationalPolytope, pitch, f: Callable[[Fraction], Fraction]):
        (a,), (b,) = P.vertices
        pitch = Q(pitch)
        k = int((b - a) / pitch)
        return cls(P, pitch, tuple(Q(f(a + i * pitch)) for i in range(k + 1)))

    @classmethod
    def from_polynomial(cls, P: RationalPolytope, pitch, coeffs: Sequence):
        coeffs = tuple(Q(c) for c in coeffs)
        (a,), (b,) = P.vertices
        pitch = Q(pitch)
        k = int((b - a) / pitch)
        vals = tuple(poly_eval(coeffs, a + i * pitch) for i in range(k + 1))
        return cls(P, pitch, vals, coeffs)

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        return self.P.vertices[0][0], self.P.vertices[1][0]

    @property
    def grid(self) -> tuple[Fraction, ...]:
        a, _ = self.interval
        return tuple(a + i * self.pitch for i in range(len(self.values)))

    def __call__(self, alpha) -> Fraction:
        x = alpha[0] if isinstance(alpha, (tuple, list)) else Q(alpha)
        x = Q(x)
        if self.poly is not None:
            return poly_eval(self.poly, x)
        a, _ = self.interval
        k = (x - a) / self.pitch
        if k.denominator == 1 and 0 <= k < len(self.values):
            return self.values[int(k)]
        raise UnsupportedModeError(f"value at {x} is not on the sample grid")

    def bounds(self) -> list[tuple[Fraction, Fraction, Line, Line]]:
        """Elementary intervals ``(x0, x1, lower, upper)`` with affine bounds."""
        xs, v = self.grid, self.values
        K = len(v) - 1
        out = []
        for k in range(K):
            x0, x1 = xs[k], xs[k + 1]
            lo = _through(x0, v[k], x1, v[k + 1])
            his = []
            if k >= 1:
                his.append(_through(xs[k - 1], v[k - 1], x0, v[k]))
            if k + 2 <= K:
                his.append(_through(x1, v[k + 1], xs[k + 2], v[k + 2]))
            out.extend((u0, u1, lo, h) for u0, u1, h in _lower_envelope(x0, x1, his))
        return out


def _lower_envelope(x0, x1, lines: Sequence[Line]):
    """Split [x0, x1] so that min(lines) is a single line on each part."""
    if len(lines) == 1:
        return [(x0, x1, lines[0])]
    l1, l2 = lines
    cuts = [x0, x1]
    if l1[0] != l2[0]:
        x = (l2[1] - l1[1]) / (l1[0] - l2[0])
        if x0 < x < x1:
            cuts = [x0, x, x1]
    out = []
    for u0, u1 in zip(cuts, cuts[1:]):
        m = (u0 + u1) / 2
        out.append((u0, u1, l1 if _line_at(l1, m) <= _line_at(l2, m) else l2))
    return out


ConcaveData = Union[ConcavePLFunction, SampledConcave]


def affine_bounds(g: ConcaveData):
    if isinstance(g, SampledConcave):
        return g.bounds()
    out = []
    for piece, cell in g.cells:
        (x0,), (x1,) = cell.vertices
        line = (piece.slope[0], piece.const)
        out.append((x0, x1, line, line))
    return out


def _merge(b1, b2):
    pts = sorted({x for b in (b1, b2) for u0, u1, _, _ in b for x in (u0, u1)})
    out = []
    for x0, x1 in zip(pts, pts[1:]):
        m = (x0 + x1) / 2
        r1 = next(r for r in b1 if r[0] <= m <= r[1])
        r2 = next(r for r in b2 if r[0] <= m <= r[1])
        out.append((x0, x1, r1[2], r1[3], r2[2], r2[3]))
    return out


def _sub(l1: Line, l2: Line) -> Line:
    return l1[0] - l2[0], l1[1] - l2[1]


def _neg(l: Line) -> Line:
    return -l[0], -l[1]


def _int_line_power(l: Line, p: int, a, b) -> Fraction:
    s, c = l
    if s == 0:
        return c ** p * (b - a)
    return ((s * b + c) ** (p + 1) - (s * a + c) ** (p + 1)) / (s * (p + 1))


def _max_lines_pieces(a, b, lines: Sequence[Line]):
    """Split [a, b] where the upper envelope of ``lines`` changes line."""
    cuts = {a, b}
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            (s1, c1), (s2, c2) = lines[i], lines[j]
            if s1 != s2:
                x = (c2 - c1) / (s1 - s2)
                if a < x < b:
                    cuts.add(x)
    cuts = sorted(cuts)
    out = []
    for u0, u1 in zip(cuts, cuts[1:]):
        m = (u0 + u1) / 2
        out.append((u0, u1, max(lines, key=lambda l: _line_at(l, m))))
    return out


def diff_power_enclosure(g1: ConcaveData, g2: ConcaveData, p) -> Enclosure:
    """Bounds on the L^p(lambda_P) p-th power (or sup for p = inf) of g1 - g2."""
    rows = _merge(affine_bounds(g1), affine_bounds(g2))
    lo_total, hi_total = Fraction(0), Fraction(0)
    lo_sup, hi_sup = Fraction(0), Fraction(0)
    zero: Line = (Fraction(0), Fraction(0))
    for x0, x1, lo1, hi1, lo2, hi2 in rows:
        L = _sub(lo1, hi2)
        U = _sub(hi1, lo2)
        for u0, u1, l in _max_lines_pieces(x0, x1, [L, _neg(U), zero]):
            if p == "inf":
                lo_sup = max(lo_sup, _line_at(l, u0), _line_at(l, u1))
            else:
                lo_total += _int_line_power(l, p, u0, u1)
        for u0, u1, l in _max_lines_pieces(x0, x1, [U, _neg(L)]):
            if p == "inf":
                hi_sup = max(hi_sup, _line_at(l, u0), _line_at(l, u1))
            else:
                hi_total += _int_line_power(l, p, u0, u1)
    if p == "inf":
        return Enclosure(lo_sup, hi_sup)
    length = rows[-1][1] - rows[0][0]
    return Enclosure(lo_total / length, hi_total / length)


def exact_diff_power(g1: SampledConcave, g2: ConcavePLFunction, p):
    """Exact |g1 - g2|^p mean (or sup) when g1 carries a polynomial and
    g1 - g2 is certifiably nonnegative; otherwise ``None``."""
    if g1.poly is None:
        return None
    total, sup = Fraction(0), Fraction(0)
    for piece, cell in g2.cells:
        (a,), (b,) = cell.vertices
        h = poly_add(g1.poly, (-piece.const, -piece.slope[0]))
        # h is concave on [a, b], so it is >= min(h(a), h(b)) there
        if poly_eval(h, a) < 0 or poly_eval(h, b) < 0:
            return None
        if p == "inf":
            m = _poly_max(h, a, b)
            if m is None:
                return None
            sup = max(sup, m)
        else:
            total += poly_integrate(poly_pow(h, p), a, b)
    if p == "inf":
        return sup
    lo, hi = g1.interval
    return total / (hi - lo)


def _poly_max(h, a, b):
    cands = [a, b]
    d = poly_deriv(h)
    if len(d) == 2:
        x = -d[0] / d[1]
        cands.append(x)
    elif len(d) == 3:
        c0, c1, c2 = d
        r = _exact_sqrt(c1 * c1 - 4 * c0 * c2)
        if r is None:
            return None
        cands += [(-c1 - r) / (2 * c2), (-c1 + r) / (2 * c2)]
    return max(poly_eval(h, x) for x in cands if a <= x <= b)


def integral_enclosure(g: SampledConcave) -> Enclosure:
    """Normalized integral of g over its interval."""
    lo, hi = g.interval
    if g.poly is not None:
        v = poly_integrate(g.poly, lo, hi) / (hi - lo)
        return Enclosure(v, v)
    lo_t = sum((_int_line_power(l, 1, x0, x1) for x0, x1, l, _ in g.bounds()), Fraction(0))
    hi_t = sum((_int_line_power(u, 1, x0, x1) for x0, x1, _, u in g.bounds()), Fraction(0))
    return Enclosure(lo_t / (hi - lo), hi_t / (hi - lo))


def max_enclosure(g: SampledConcave) -> Enclosure:
    lo, hi = g.interval
    if g.poly is not None:
        m = _poly_max(g.poly, lo, hi)
        if m is not None:
            return Enclosure(m, m)
    low = max(g.values)
    up = max(max(_line_at(u, x0), _line_at(u, x1)) for x0, x1, _, u in g.bounds())
    return Enclosure(low, max(low, up))


def empirical_measure(g: SampledConcave) -> DiscreteMeasure:
    """Trapezoid-weighted empirical distribution of the grid values."""
    K = len(g.values) - 1
    w_end, w_mid = Fraction(1, 2 * K), Fraction(1, K)
    pairs = [(v, w_end if k in (0, K) else w_mid) for k, v in enumerate(g.values)]
    return DiscreteMeasure.from_pairs(pairs)
