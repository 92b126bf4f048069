"""Probability measures with exact rational data.

``DiscreteMeasure`` covers finite-level spectral measures and Monge-Ampere
measures of piecewise-linear norms. ``PLMeasure1D`` is a measure on the
line with a piecewise-polynomial CDF, the shape taken by pushforwards of
normalized Lebesgue measure under piecewise-affine maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Callable, Hashable, Iterable, Sequence

from ._exact import Enclosure, Q


class MeasureError(ValueError):
    pass


def _key(atom):
    return atom


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely many distinct atoms with positive rational masses summing to 1.

    Atoms are either rationals or tuples of rationals (points of Q^n).
    """

    atoms: tuple
    masses: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.atoms) != len(self.masses):
            raise MeasureError("atoms and masses differ in length")
        if not self.atoms:
            raise MeasureError("a probability measure needs at least one atom")
        if len(set(self.atoms)) != len(self.atoms):
            raise MeasureError("duplicate atoms")
        if any(m <= 0 for m in self.masses):
            raise MeasureError("masses must be positive")
        if sum(self.masses) != 1:
            raise MeasureError(f"masses sum to {sum(self.masses)}, not 1")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Hashable, Fraction]]) -> "DiscreteMeasure":
        """Build from (atom, mass) pairs, merging repeated atoms and dropping zeros."""
        acc: dict = {}
        for atom, mass in pairs:
            atom = _normalize_atom(atom)
            acc[atom] = acc.get(atom, Fraction(0)) + Q(mass)
        items = sorted(((a, m) for a, m in acc.items() if m != 0), key=lambda am: _key(am[0]))
        return cls(tuple(a for a, _ in items), tuple(m for _, m in items))

    @classmethod
    def dirac(cls, atom) -> "DiscreteMeasure":
        return cls((_normalize_atom(atom),), (Fraction(1),))

    @classmethod
    def uniform(cls, atoms: Sequence) -> "DiscreteMeasure":
        w = Fraction(1, len(atoms))
        return cls.from_pairs((a, w) for a in atoms)

    def items(self):
        return zip(self.atoms, self.masses)

    def as_dict(self) -> dict:
        return dict(self.items())

    def mass_at(self, atom) -> Fraction:
        return self.as_dict().get(_normalize_atom(atom), Fraction(0))

    @property
    def is_scalar(self) -> bool:
        return not isinstance(self.atoms[0], tuple)

    def barycenter(self):
        if self.is_scalar:
            return sum((a * m for a, m in self.items()), Fraction(0))
        n = len(self.atoms[0])
        return tuple(sum((a[i] * m for a, m in self.items()), Fraction(0)) for i in range(n))

    def pushforward(self, f: Callable) -> "DiscreteMeasure":
        return DiscreteMeasure.from_pairs((f(a), m) for a, m in self.items())

    def reflect(self) -> "DiscreteMeasure":
        return self.pushforward(_neg)

    def translate(self, c) -> "DiscreteMeasure":
        c = Q(c) if self.is_scalar else tuple(Q(x) for x in c)
        if self.is_scalar:
            return self.pushforward(lambda a: a + c)
        return self.pushforward(lambda a: tuple(x + y for x, y in zip(a, c)))

    def scale(self, t) -> "DiscreteMeasure":
        t = Q(t)
        if self.is_scalar:
            return self.pushforward(lambda a: t * a)
        return self.pushforward(lambda a: tuple(t * x for x in a))

    def expect(self, f: Callable) -> Fraction:
        return sum((f(a) * m for a, m in self.items()), Fraction(0))

    def cdf(self, t) -> Fraction:
        t = Q(t)
        return sum((m for a, m in self.items() if a <= t), Fraction(0))

    def wasserstein1(self, other: "DiscreteMeasure") -> Fraction:
        """Exact W1 distance between two scalar measures: integral of |F - G|."""
        if not (self.is_scalar and other.is_scalar):
            raise MeasureError("wasserstein1 is implemented for measures on the line")
        pts = sorted(set(self.atoms) | set(other.atoms))
        total = Fraction(0)
        for a, b in zip(pts, pts[1:]):
            total += abs(self.cdf(a) - other.cdf(a)) * (b - a)
        return total


def _neg(a):
    if isinstance(a, tuple):
        return tuple(-x for x in a)
    return -a


def _normalize_atom(atom):
    if isinstance(atom, (tuple, list)):
        return tuple(Q(x) for x in atom)
    return Q(atom)


# ---------------------------------------------------------------------------
# Polynomials in one variable, coefficient tuples in increasing degree.


def poly_eval(p: Sequence[Fraction], t: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * t + c
    return acc


def poly_add(p, q):
    n = max(len(p), len(q))
    out = [Fraction(0)] * n
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    return _trim(out)


def poly_mul(p, q):
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return _trim(out)


def poly_scale(p, s):
    return _trim([c * s for c in p])


def poly_pow(p, k: int):
    out: tuple = (Fraction(1),)
    for _ in range(k):
        out = poly_mul(out, p)
    return out


def poly_deriv(p):
    return _trim([i * c for i, c in enumerate(p)][1:])


def poly_antideriv(p):
    return _trim([Fraction(0)] + [c / (i + 1) for i, c in enumerate(p)])


def poly_integrate(p, a, b) -> Fraction:
    P = poly_antideriv(p)
    return poly_eval(P, b) - poly_eval(P, a)


def poly_shift(p, s):
    """Coefficients of t -> p(t + s)."""
    out: tuple = ()
    for c in reversed(p):
        out = poly_add(poly_mul(out, (s, Fraction(1))), (c,))
    return out


def _trim(p) -> tuple:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def _exact_sqrt(x: Fraction):
    if x < 0:
        return None
    a, b = isqrt(x.numerator), isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Fraction(a, b)
    return None


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PLMeasure1D:
    """Probability measure on the line given by an exact piecewise-polynomial CDF.

    ``breakpoints`` are ``t_0 < ... < t_k``; on ``[t_i, t_{i+1})`` the CDF is
    the polynomial ``pieces[i]``. The CDF vanishes below ``t_0`` and equals 1
    from ``t_k`` on, so atoms appear as jumps at breakpoints.
    """

    breakpoints: tuple[Fraction, ...]
    pieces: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if not self.breakpoints:
            raise MeasureError("empty measure")
        if len(self.pieces) != len(self.breakpoints) - 1:
            raise MeasureError("need one CDF piece per interval")
        if any(a >= b for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise MeasureError("breakpoints must increase strictly")
        prev = Fraction(0)
        for (a, b), p in zip(zip(self.breakpoints, self.breakpoints[1:]), self.pieces):
            if poly_eval(p, a) < prev or poly_eval(p, b) < poly_eval(p, a):
                raise MeasureError("CDF is not nondecreasing")
            prev = poly_eval(p, b)
        if prev > 1:
            raise MeasureError("CDF exceeds 1")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_contributions(cls, ramps: Iterable[tuple[Fraction, Fraction, tuple]],
                           atoms: Iterable[tuple[Fraction, Fraction]] = ()) -> "PLMeasure1D":
        """Sum elementary CDF contributions.

        Each ramp ``(lo, hi, poly)`` contributes 0 below ``lo``, ``poly(t)`` on
        ``[lo, hi]`` and ``poly(hi)`` above; ``poly(lo)`` must be 0. Each atom
        ``(x, m)`` contributes a step of height ``m`` at ``x``.
        """
        ramps = list(ramps)
        atoms = [(Q(x), Q(m)) for x, m in atoms if m != 0]
        pts = sorted({r[0] for r in ramps} | {r[1] for r in ramps} | {x for x, _ in atoms})
        pieces = []
        for a, b in zip(pts, pts[1:]):
            acc: tuple = ()
            for lo, hi, p in ramps:
                if hi <= a:
                    acc = poly_add(acc, (poly_eval(p, hi),))
                elif lo <= a and b <= hi:
                    acc = poly_add(acc, p)
            for x, m in atoms:
                if x <= a:
                    acc = poly_add(acc, (m,))
            pieces.append(acc)
        out = cls(tuple(pts), tuple(pieces))
        return out._simplified()

    @classmethod
    def dirac(cls, x) -> "PLMeasure1D":
        return cls((Q(x),), ())

    def _simplified(self) -> "PLMeasure1D":
        # merge adjacent intervals carrying the same polynomial with no jump between
        bps = [self.breakpoints[0]]
        pcs: list = []
        for i, p in enumerate(self.pieces):
            if pcs and pcs[-1] == p:
                bps[-1] = self.breakpoints[i + 1]
            else:
                pcs.append(p)
                bps.append(self.breakpoints[i + 1])
        return PLMeasure1D(tuple(bps), tuple(pcs))

    # -- queries ----------------------------------------------------------

    def cdf(self, t) -> Fraction:
        t = Q(t)
        bps = self.breakpoints
        if t < bps[0]:
            return Fraction(0)
        if t >= bps[-1]:
            return Fraction(1)
        for i in range(len(self.pieces)):
            if bps[i] <= t < bps[i + 1]:
                return poly_eval(self.pieces[i], t)
        raise AssertionError("unreachable")

    def atoms(self) -> dict[Fraction, Fraction]:
        out = {}
        prev = Fraction(0)
        for i, t in enumerate(self.breakpoints):
            right = poly_eval(self.pieces[i], t) if i < len(self.pieces) else Fraction(1)
            if right != prev:
                out[t] = right - prev
            if i < len(self.pieces):
                prev = poly_eval(self.pieces[i], self.breakpoints[i + 1])
        return out

    @property
    def support(self) -> tuple[Fraction, Fraction]:
        return self.breakpoints[0], self.breakpoints[-1]

    @property
    def degree(self) -> int:
        return max((len(p) - 1 for p in self.pieces), default=0)

    def expect_poly(self, f: Sequence[Fraction]) -> Fraction:
        """Exact integral of the polynomial ``f`` against the measure."""
        total = sum((poly_eval(f, x) * m for x, m in self.atoms().items()), Fraction(0))
        for (a, b), p in zip(zip(self.breakpoints, self.breakpoints[1:]), self.pieces):
            total += poly_integrate(poly_mul(f, poly_deriv(p)), a, b)
        return total

    def mean(self) -> Fraction:
        return self.expect_poly((Fraction(0), Fraction(1)))

    def abs_moment(self, p: int) -> Fraction:
        """Exact integral of ``|t|^p``."""
        mono = tuple([Fraction(0)] * p + [Fraction(1)])
        total = sum((abs(x) ** p * m for x, m in self.atoms().items()), Fraction(0))
        for (a, b), piece in zip(zip(self.breakpoints, self.breakpoints[1:]), self.pieces):
            dens = poly_deriv(piece)
            for lo, hi in _split_at_zero(a, b):
                sign = 1 if lo >= 0 else (-1) ** p
                total += sign * poly_integrate(poly_mul(mono, dens), lo, hi)
        return total

    def abs_moment_float(self, p: float) -> float:
        """Integral of ``|t|^p`` for real ``p > 0``, evaluated in binary64."""
        total = sum(abs(float(x)) ** p * float(m) for x, m in self.atoms().items())
        for (a, b), piece in zip(zip(self.breakpoints, self.breakpoints[1:]), self.pieces):
            dens = poly_deriv(piece)
            for lo, hi in _split_at_zero(a, b):
                for k, c in enumerate(dens):
                    # on the negative side |t|^p t^k = (-1)^k |t|^(p+k)
                    e = p + k + 1
                    if lo >= 0:
                        part = (float(hi) ** e - float(lo) ** e) / e
                    else:
                        part = (-1) ** k * ((-float(lo)) ** e - (-float(hi)) ** e) / e
                    total += float(c) * part
        return total

    def median(self):
        """Smallest ``t`` with ``cdf(t) >= 1/2``.

        Returns a ``Fraction`` when the median is rational, otherwise a tight
        ``Enclosure`` around the (irrational) root.
        """
        half = Fraction(1, 2)
        bps = self.breakpoints
        for i, p in enumerate(self.pieces):
            a, b = bps[i], bps[i + 1]
            if poly_eval(p, a) >= half:
                return a
            if poly_eval(p, b) >= half:
                return _root_in(poly_add(p, (-half,)), a, b)
        return bps[-1]

    def table(self, ts: Iterable) -> list[tuple[Fraction, Fraction]]:
        return [(Q(t), self.cdf(t)) for t in ts]

    def default_grid(self, n_uniform: int = 64) -> list[Fraction]:
        lo, hi = self.support
        pts = set(self.breakpoints)
        if hi > lo:
            pts |= {lo + (hi - lo) * Fraction(k, n_uniform) for k in range(n_uniform + 1)}
        return sorted(pts)


def _split_at_zero(a, b):
    if a < 0 < b:
        return [(a, Fraction(0)), (Fraction(0), b)]
    return [(a, b)]


def _root_in(p, a, b, width=Fraction(1, 10**30)):
    """Smallest root of the nondecreasing polynomial ``p`` in ``(a, b]``."""
    if len(p) <= 2:
        return -p[0] / p[1] if len(p) == 2 else a
    if len(p) == 3:
        c0, c1, c2 = p
        disc = c1 * c1 - 4 * c2 * c0
        r = _exact_sqrt(disc)
        if r is not None:
            roots = sorted(((-c1 - r) / (2 * c2), (-c1 + r) / (2 * c2)))
            for x in roots:
                if a < x <= b:
                    return x
    lo, hi = a, b
    while hi - lo > width:
        mid = (lo + hi) / 2
        if poly_eval(p, mid) >= 0:
            hi = mid
        else:
            lo = mid
    return Enclosure(lo, hi)
