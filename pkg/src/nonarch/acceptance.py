"""The bundled acceptance suite.

Each criterion is a function of a seed returning ``(ok, detail)``. The
runner times it and fails it if it exceeds its budget. Tags let
``selftest --filter`` pick subsets.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import energy as en
from . import fdnorm as fd
from . import toricnorm as tn
from ._exact import Enclosure, dot
from .measures import DiscreteMeasure
from .polytope import (AffinePiece, ConcavePLFunction, RationalPolytope, biconjugate,
                       inverse_legendre, legendre)


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    tags: tuple[str, ...]
    budget: float  # seconds
    check: Callable[[int], tuple[bool, str]]


@dataclass(frozen=True)
class Outcome:
    criterion: Criterion
    passed: bool
    seconds: float
    detail: str

    def line(self) -> str:
        c = self.criterion
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {c.number:2d}. {c.title} ({self.seconds:.2f}s / {c.budget:g}s): {self.detail}"


UNIT = RationalPolytope.interval(0, 1)
SQUARE = RationalPolytope.unit_cube(2)
TRIANGLE = RationalPolytope.standard_simplex(2)


def _rat(rng: random.Random, num: int = 6, den: int = 4) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def random_pl_norm(rng: random.Random, P: RationalPolytope, pieces: int = 4,
                   nonnegative: bool = False) -> tn.ToricHomNorm:
    n = P.dim
    ps = [AffinePiece(tuple(_rat(rng) for _ in range(n)), _rat(rng)) for _ in range(pieces)]
    g = ConcavePLFunction(P, tuple(ps))
    if nonnegative:
        g = g + (Fraction(rng.randint(0, 3), 4) - g.min_value)
    return tn.ToricHomNorm(g)


def random_fd_norm(rng: random.Random, n: int, basis: bool = True) -> fd.FiniteDimNorm:
    values = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(n)]
    if not basis:
        return fd.FiniteDimNorm(tuple(values))
    while True:
        cols = tuple(tuple(Fraction(rng.randint(-2, 2)) for _ in range(n)) for _ in range(n))
        try:
            return fd.FiniteDimNorm(tuple(values), cols)
        except ValueError:
            continue


# ---------------------------------------------------------------------------


def _c1(seed):
    g = tn.divisorial_norm(UNIT, [((1,), 0), ((0,), Fraction(1, 3))])
    got = [(p.slope, p.const) for p in legendre(g.g).pieces]
    want = [((Fraction(1),), Fraction(1, 3)), ((Fraction(1, 3),), Fraction(1, 3)),
            ((Fraction(0),), Fraction(0))]
    return sorted(got) == sorted(want), f"pieces {[(str(s[0]), str(c)) for s, c in got]}"


def _c2(seed):
    g = tn.divisorial_norm(UNIT, [((1,), 0), ((0,), Fraction(1, 3))])
    vol = tn.volume(g)
    ma = tn.monge_ampere(g)
    want = DiscreteMeasure.from_pairs([((1,), Fraction(1, 3)), ((0,), Fraction(2, 3))])
    return vol == Fraction(5, 18) and ma == want, "vol {}, MA {}".format(
        vol, " + ".join(f"{m} at {a[0]}" for a, m in ma.items()))


def subvariety_norm(degrees) -> tn.TruncatedToricNorm:
    """The norm of the point alpha = 1 on the projective line: h(m, a) = m if a >= 1 else 0."""
    return tn.TruncatedToricNorm.from_function(
        UNIT, degrees, lambda m, a: m if a[0] >= 1 else 0, d=1)


def _c3(seed):
    chi = subvariety_norm([10, 100])
    ok, parts = True, []
    for m in (10, 100):
        w = tn.spectral_measure_truncated(chi, m).wasserstein1(DiscreteMeasure.dirac(1))
        ok &= w == Fraction(1, m + 1)
        parts.append(f"W1(m={m}) = {w}")
    ok &= w <= Fraction(1, 100)
    return ok, ", ".join(parts)


def _c4(seed):
    rng = random.Random(seed)
    bad = 0
    for i in range(200):
        P = [UNIT, SQUARE, TRIANGLE][i % 3]
        p = 1 + i % 3
        chi = random_pl_norm(rng, P, pieces=rng.randint(1, 4), nonnegative=True)
        triv = tn.ToricHomNorm.trivial(P)
        dp = tn.distance(chi, triv, p)
        if tn.lambda_max(chi) ** p > math.comb(P.dim + p, P.dim) * dp:
            bad += 1
    lin = tn.from_valuation(UNIT, (2,))
    eq = tn.lambda_max(lin) == 2 * tn.distance(lin, tn.ToricHomNorm.trivial(UNIT), 1)
    return bad == 0 and eq, f"{bad} violations in 200; equality at g=2a: {eq}"


def _c5(seed):
    chi = tn.sampled_norm(UNIT, Fraction(1, 64), poly=(0, 1, -1))
    vals = []
    for d in (2, 4, 8, 16, 32, 64):
        e = tn.distance(tn.canonical_approximant(chi, d), chi, 1)
        vals.append(e)
    exact = all(isinstance(e, Enclosure) and e.exact for e in vals)
    dec = all(b.hi < a.lo for a, b in zip(vals, vals[1:]))
    ok = exact and dec and vals[0].lo == Fraction(1, 24) and vals[-1].hi < Fraction(1, 100)
    return ok, "d_1 = " + ", ".join(str(e.lo) for e in vals)


def _c6(seed):
    rng = random.Random(seed)
    bad, worst = 0, 0.0
    bary = SQUARE.barycenter
    for _ in range(50):
        xi = (_rat(rng, 8, 5), _rat(rng, 8, 5))
        chi = tn.from_valuation(SQUARE, xi)
        S = dot(xi, bary) - SQUARE.min_linear(xi)
        dual, _ = en.energy_dual(SQUARE, DiscreteMeasure.dirac(xi))
        worst = max(worst, abs(dual - float(S)))
        if tn.volume(chi) != S or en.minimum_norm(chi) != S or abs(dual - float(S)) > 1e-9:
            bad += 1
    return bad == 0, f"{bad} failures in 50; max |E^vee - S| = {worst:.2e}"


def _c7(seed):
    rng = random.Random(seed)
    atoms = set()
    while len(atoms) < 4:
        atoms.add((Fraction(rng.randint(-4, 4), 2), Fraction(rng.randint(-4, 4), 2)))
    mu = DiscreteMeasure.uniform(sorted(atoms))
    value, sol = en.energy_dual(SQUARE, mu)
    exact = en.dual_objective(SQUARE, sol.atoms, sol.target, sol.weights) - sum(
        (t * SQUARE.min_linear(a) for a, t in zip(sol.atoms, sol.target)), Fraction(0))
    gap = abs(value - float(exact))
    half, _ = en.energy_dual(UNIT, DiscreteMeasure.from_pairs([(0, Fraction(1, 2)),
                                                                (1, Fraction(1, 2))]))
    ok = sol.residual <= 1e-6 and gap <= 1e-8 and abs(half - 0.125) <= 1e-8
    return ok, (f"residual {sol.residual:.2e}, re-evaluation gap {gap:.2e}, "
                f"half/half instance {half!r}")


def _c8(seed):
    rng = random.Random(seed)
    bad = 0
    for _ in range(100):
        a, b = random_fd_norm(rng, 5), random_fd_norm(rng, 5)
        m = fd.min_norm(a, b)
        ok = fd.distance(a, b, 1) == fd.volume(a) + fd.volume(b) - 2 * fd.volume(m)
        ok &= all(fd.distance(a, b, p) == fd.distance(a, m, p) + fd.distance(m, b, p)
                  for p in (1, 2, 3))
        e = random_fd_norm(rng, 5).vectors
        ok &= fd.volume(fd.gram_schmidt_retract(a, e)) == fd.volume(a)
        a2, b2 = random_fd_norm(rng, 5), random_fd_norm(rng, 5)
        ok &= (fd.distance(fd.min_norm(a, a2), fd.min_norm(b, b2), 1)
               <= fd.distance(a, b, 1) + fd.distance(a2, b2, 1))
        bad += not ok
    return bad == 0, f"{bad} failing pairs in 100"


def _c9(seed):
    rng = random.Random(seed)
    bad = 0
    for i in range(100):
        P = [UNIT, SQUARE, TRIANGLE][i % 3]
        g = random_pl_norm(rng, P, pieces=rng.randint(1, 5)).g
        G = legendre(g)
        ok = biconjugate(g) == g
        ok &= legendre(inverse_legendre(G, P)) == G
        pts = P.lattice_points(2)
        samples = [(tuple(Fraction(x, 2) for x in a), _rat(rng)) for a in pts]
        h = biconjugate(samples, P)
        ok &= biconjugate(h) == h
        ok &= all(h(a) >= y for a, y in samples)
        bad += not ok
    return bad == 0, f"{bad} failures in 100"


def _c10(seed):
    rng = random.Random(seed)
    bad = 0
    for i in range(50):
        P = SQUARE if i % 2 else UNIT
        v = tuple(_rat(rng) for _ in range(P.dim))
        w = tuple(_rat(rng) for _ in range(P.dim))
        cv, cw = tn.from_valuation(P, v), tn.from_valuation(P, w)
        dinf = tn.distance(cv, cw, "inf")
        ok = dinf == max(tn.fs_at(cv, w), tn.fs_at(cw, v))
        ok &= en.dirac_distance(P, v, w) <= dinf
        bad += not ok
    return bad == 0, f"{bad} failures in 50"


CRITERIA: tuple[Criterion, ...] = (
    Criterion(1, "Legendre closed form", ("toric", "legendre"), 1, _c1),
    Criterion(2, "volume and Monge-Ampere measure", ("toric", "energy"), 1, _c2),
    Criterion(3, "spectral-measure limit", ("toric", "spectral"), 1, _c3),
    Criterion(4, "d_p versus lambda_max bound", ("toric", "dp"), 10, _c4),
    Criterion(5, "approximant convergence", ("toric", "sampled", "approx"), 5, _c5),
    Criterion(6, "valuation chain S = vol = min norm = E^vee", ("energy", "ot"), 10, _c6),
    Criterion(7, "transport solver fixed point", ("energy", "ot"), 10, _c7),
    Criterion(8, "exact finite-dimensional identities", ("fd",), 10, _c8),
    Criterion(9, "operator calculus", ("toric", "legendre", "operator"), 5, _c9),
    Criterion(10, "d_inf identity", ("toric", "dinf"), 5, _c10),
)


def select(name: str | None = None) -> list[Criterion]:
    if not name:
        return list(CRITERIA)
    return [c for c in CRITERIA if name in c.tags or name == str(c.number)]


def run_one(c: Criterion, seed: int = 0) -> Outcome:
    t0 = time.perf_counter()
    try:
        ok, detail = c.check(seed)
    except Exception as exc:  # a crash is a failure of the criterion, reported as such
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
    dt = time.perf_counter() - t0
    if ok and dt > c.budget:
        ok, detail = False, detail + f"; over the {c.budget:g}s budget"
    return Outcome(c, bool(ok), dt, detail)


def run(seed: int = 0, name: str | None = None) -> list[Outcome]:
    return [run_one(c, seed) for c in select(name)]
