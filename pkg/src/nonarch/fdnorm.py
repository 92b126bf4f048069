"""Non-Archimedean norms on finite-dimensional rational vector spaces.

A norm is stored as a diagonalizing basis together with the values it takes
on the basis vectors; ``chi(sum a_i b_i) = min{values[i] : a_i != 0}``.
Everything is exact; the zero vector has norm ``INFINITY``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

from ._exact import INFINITY, Q, det, qvec, rank, rref, nullspace, solve, transpose
from .measures import DiscreteMeasure

MAX_JOINT_DIM = 64

Vector = tuple[Fraction, ...]


class DimensionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteDimNorm:
    """Norm diagonal in ``basis`` (a tuple of column vectors).

    ``basis=None`` means the standard basis, which keeps large diagonal norms
    cheap (no matrix is ever materialized).
    """

    values: tuple[Fraction, ...]
    basis: Optional[tuple[Vector, ...]] = None
    _check: bool = field(default=True, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", qvec(self.values))
        if not self.values:
            raise DimensionError("dimension must be positive")
        if self.basis is not None:
            cols = tuple(qvec(c) for c in self.basis)
            object.__setattr__(self, "basis", cols)
            if len(cols) != self.dim or any(len(c) != self.dim for c in cols):
                raise DimensionError("basis must be N vectors of length N")
            if self._check and det(transpose(cols)) == 0:
                raise ValueError("basis is singular")

    @classmethod
    def diagonal(cls, values: Sequence) -> "FiniteDimNorm":
        return cls(tuple(values))

    @classmethod
    def trivial(cls, n: int) -> "FiniteDimNorm":
        return cls((Fraction(0),) * n)

    @property
    def dim(self) -> int:
        return len(self.values)

    @property
    def vectors(self) -> tuple[Vector, ...]:
        if self.basis is not None:
            return self.basis
        return _standard_basis(self.dim)

    @cached_property
    def jumps(self) -> tuple[Fraction, ...]:
        """Distinct values, decreasing."""
        return tuple(sorted(set(self.values), reverse=True))

    def coordinates(self, v: Sequence) -> list[Fraction]:
        v = qvec(v)
        if len(v) != self.dim:
            raise DimensionError(f"vector has length {len(v)}, expected {self.dim}")
        if self.basis is None:
            return list(v)
        return solve(transpose(self.basis), v)

    def __call__(self, v: Sequence):
        return evaluate(self, v)

    def filtration(self, lam, strict: bool = False) -> list[Vector]:
        """Spanning vectors of F^lam (or F^{>lam} when ``strict``)."""
        lam = Q(lam)
        return [b for b, x in zip(self.vectors, self.values) if (x > lam if strict else x >= lam)]

    def filtration_dim(self, lam) -> int:
        lam = Q(lam)
        return sum(1 for x in self.values if x >= lam)

    def __add__(self, c) -> "FiniteDimNorm":
        c = Q(c)
        return FiniteDimNorm(tuple(x + c for x in self.values), self.basis, _check=False)

    def scaled(self, t) -> "FiniteDimNorm":
        t = Q(t)
        if t <= 0:
            raise ValueError("scaling factor must be positive")
        return FiniteDimNorm(tuple(t * x for x in self.values), self.basis, _check=False)

    def __repr__(self) -> str:
        kind = "std" if self.basis is None else "custom"
        return f"FiniteDimNorm(dim={self.dim}, basis={kind}, values={[str(v) for v in self.values]})"


@dataclass(frozen=True)
class RelativeSpectrum:
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if any(a < b for a, b in zip(self.values, self.values[1:])):
            raise ValueError("relative spectrum must be sorted non-increasingly")

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


def _standard_basis(n: int) -> tuple[Vector, ...]:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def _same_dim(a: FiniteDimNorm, b: FiniteDimNorm):
    if a.dim != b.dim:
        raise DimensionError(f"dimensions differ: {a.dim} vs {b.dim}")


def evaluate(norm: FiniteDimNorm, vector: Sequence):
    coords = norm.coordinates(vector)
    vals = [x for a, x in zip(coords, norm.values) if a != 0]
    return min(vals) if vals else INFINITY


# -- subspace arithmetic --------------------------------------------------


def _span_basis(vectors: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    return rref(vectors)[0] if vectors else []


def _intersect(u: Sequence[Vector], w: Sequence[Vector], n: int) -> list[list[Fraction]]:
    if not u or not w:
        return []
    # solve sum a_i u_i = sum b_j w_j
    cols = [list(x) for x in u] + [[-c for c in x] for x in w]
    rows = transpose(cols)
    kernel = nullspace(rows, len(cols))
    vecs = []
    for k in kernel:
        vecs.append([sum((k[i] * u[i][r] for i in range(len(u))), Fraction(0)) for r in range(n)])
    return _span_basis(vecs)


def _extend(base: list, candidates: list) -> list:
    """Greedily pick candidates that are independent modulo span(base)."""
    picked = []
    current = list(base)
    r = rank(current) if current else 0
    for c in candidates:
        trial = current + [list(c)]
        if rank(trial) > r:
            picked.append(tuple(c))
            current = trial
            r += 1
    return picked


def _eliminate(chi: FiniteDimNorm, chi2: FiniteDimNorm):
    """Joint basis by pivot elimination, with both value lists.

    Coordinates are taken in chi's basis ordered by decreasing value, so a
    vector's chi-value is the value at its last nonzero coordinate (its
    pivot). chi2's basis vectors are visited by decreasing chi2-value and
    reduced against earlier ones until all pivots differ. Distinct pivots make
    the result chi-orthogonal, and the reduction is unitriangular for chi2.
    """
    n = chi.dim
    C = chi2.vectors
    if chi.basis is None:
        coords = [list(c) for c in C]
    else:
        aug = [list(row) + [c[r] for c in C] for r, row in enumerate(transpose(chi.basis))]
        red, _ = rref(aug)
        coords = [[red[r][n + j] for r in range(n)] for j in range(n)]
    perm = sorted(range(n), key=lambda i: -chi.values[i])
    order = sorted(range(n), key=lambda j: -chi2.values[j])
    used: dict[int, tuple[list, list]] = {}
    basis, va, vb = [], [], []
    for j in order:
        v = [coords[j][i] for i in perm]
        x = list(C[j])
        while True:
            piv = max(i for i in range(n) if v[i] != 0)
            if piv not in used:
                break
            w, y = used[piv]
            f = v[piv] / w[piv]
            v = [a - f * b for a, b in zip(v, w)]
            x = [a - f * b for a, b in zip(x, y)]
        used[piv] = (v, x)
        basis.append(tuple(x))
        va.append(chi.values[perm[piv]])
        vb.append(chi2.values[j])
    return basis, va, vb


def joint_basis(chi: FiniteDimNorm, chi2: FiniteDimNorm) -> tuple[Vector, ...]:
    """A basis orthogonal for both norms, certified by dimension counts."""
    _same_dim(chi, chi2)
    if chi.basis == chi2.basis:
        return chi.vectors
    if chi.dim > MAX_JOINT_DIM:
        raise DimensionError(f"joint_basis is capped at dimension {MAX_JOINT_DIM}")
    basis = tuple(_eliminate(chi, chi2)[0])
    if not is_orthogonal(chi, basis) or not is_orthogonal(chi2, basis):
        raise AssertionError("joint basis failed the orthogonality certificate")
    return basis


def joint_basis_by_subspaces(chi: FiniteDimNorm, chi2: FiniteDimNorm) -> tuple[Vector, ...]:
    """Slow reference construction from filtration intersections.

    For each pair of jump values (lam, mu), visited in lexicographically
    decreasing order, picks vectors of F^lam & G^mu complementary to
    (F^{>lam} & G^mu) + (F^lam & G^{>mu}).
    """
    _same_dim(chi, chi2)
    n = chi.dim
    out: list[Vector] = []
    for lam in chi.jumps:
        F = chi.filtration(lam)
        Fs = chi.filtration(lam, strict=True)
        for mu in chi2.jumps:
            G = chi2.filtration(mu)
            Gs = chi2.filtration(mu, strict=True)
            A = _intersect(F, G, n)
            if not A:
                continue
            S = _intersect(Fs, G, n) + _intersect(F, Gs, n)
            out.extend(_extend(_span_basis(S), A))
    if len(out) != n:
        raise AssertionError("joint basis construction did not produce a basis")
    return tuple(out)


def is_orthogonal(chi: FiniteDimNorm, basis: Sequence[Sequence]) -> bool:
    """Dimension-count certificate: #{i : chi(b_i) >= lam} == dim F^lam for every jump."""
    if rank([list(b) for b in basis]) != chi.dim:
        return False
    vals = [evaluate(chi, b) for b in basis]
    return all(sum(1 for v in vals if v >= lam) == chi.filtration_dim(lam) for lam in chi.jumps)


def _paired_values(chi, chi2):
    if chi.basis == chi2.basis:
        return list(chi.vectors) if chi.basis is not None else None, list(chi.values), list(chi2.values)
    if chi.dim > MAX_JOINT_DIM:
        raise DimensionError(f"joint_basis is capped at dimension {MAX_JOINT_DIM}")
    return _eliminate(chi, chi2)


def relative_spectrum(chi: FiniteDimNorm, chi2: FiniteDimNorm) -> RelativeSpectrum:
    _same_dim(chi, chi2)
    _, a, b = _paired_values(chi, chi2)
    return RelativeSpectrum(tuple(sorted((x - y for x, y in zip(a, b)), reverse=True)))


def _parse_p(p):
    if p is INFINITY or p == "inf" or (isinstance(p, float) and math.isinf(p)):
        return INFINITY
    p = Fraction(p) if isinstance(p, float) else Q(p)
    if p < 1:
        raise ValueError(f"p must lie in [1, inf], got {p}")
    return p


def distance(chi: FiniteDimNorm, chi2: FiniteDimNorm, p=1):
    """d_p between two norms.

    Returns the exact value for p = 1 and p = inf, the exact p-th power
    d_p^p for integer p >= 2, and a float d_p for non-integer p. See
    ``distance_float`` for the plain root in binary64.
    """
    p = _parse_p(p)
    spec = relative_spectrum(chi, chi2).values
    return spectrum_distance(spec, p)


def spectrum_distance(spec: Sequence[Fraction], p):
    p = _parse_p(p)
    if p is INFINITY:
        return max(abs(x) for x in spec)
    if p.denominator == 1:
        k = int(p)
        return sum((abs(x) ** k for x in spec), Fraction(0)) / len(spec)
    return (sum(float(abs(x)) ** float(p) for x in spec) / len(spec)) ** (1 / float(p))


def distance_float(chi: FiniteDimNorm, chi2: FiniteDimNorm, p=1) -> float:
    p = _parse_p(p)
    d = distance(chi, chi2, p)
    if p is INFINITY or p == 1 or p.denominator != 1:
        return float(d)
    return float(d) ** (1 / float(p))


def min_norm(chi: FiniteDimNorm, chi2: FiniteDimNorm) -> FiniteDimNorm:
    """Pointwise minimum, diagonal in a joint orthogonal basis."""
    _same_dim(chi, chi2)
    b, a, c = _paired_values(chi, chi2)
    return FiniteDimNorm(tuple(min(x, y) for x, y in zip(a, c)),
                         None if b is None else tuple(b), _check=False)


def volume(chi: FiniteDimNorm) -> Fraction:
    return sum(chi.values, Fraction(0)) / chi.dim


def spectral_measure(chi: FiniteDimNorm, chi2: Optional[FiniteDimNorm] = None) -> DiscreteMeasure:
    """(1/N) sum of Diracs at the relative spectrum (chi2 defaults to the trivial norm)."""
    if chi2 is None:
        spec = chi.values
    else:
        spec = relative_spectrum(chi, chi2).values
    w = Fraction(1, len(spec))
    return DiscreteMeasure.from_pairs((x, w) for x in spec)


def lambda_extremes(chi: FiniteDimNorm) -> tuple[Fraction, Fraction]:
    return min(chi.values), max(chi.values)


def gram_schmidt_retract(chi: FiniteDimNorm, e: Sequence[Sequence]) -> FiniteDimNorm:
    """Retraction onto the apartment of ``e``.

    The value on e_i is the largest lam with e_i in F^lam + span(e_1..e_{i-1}).
    """
    cols = tuple(qvec(v) for v in e)
    if len(cols) != chi.dim or any(len(c) != chi.dim for c in cols):
        raise DimensionError("basis size does not match the norm")
    if det(transpose(cols)) == 0:
        raise ValueError("basis is singular")
    values = []
    for i, v in enumerate(cols):
        prefix = [list(c) for c in cols[:i]]
        for lam in chi.jumps:
            sub = [list(x) for x in chi.filtration(lam)] + prefix
            if rank(sub + [list(v)]) == rank(sub):
                values.append(lam)
                break
    return FiniteDimNorm(tuple(values), cols, _check=False)


def _monomials(n: int, m: int) -> list[tuple[int, ...]]:
    """Exponent vectors of degree m in n variables, lexicographically decreasing."""
    out = []

    def rec(prefix, left, k):
        if k == n - 1:
            out.append(tuple(prefix + [left]))
            return
        for a in range(left, -1, -1):
            rec(prefix + [a], left - a, k + 1)

    rec([], m, 0)
    return out


def symmetric_power_norm(chi: FiniteDimNorm, m: int) -> FiniteDimNorm:
    """Induced norm on Sym^m, diagonal in the monomials of chi's basis.

    Vectors are expressed in the monomial basis of the standard coordinates,
    ordered lexicographically decreasing (e1^m first).
    """
    if m < 1:
        raise ValueError("symmetric power needs m >= 1")
    n = chi.dim
    monos = _monomials(n, m)
    index = {mono: k for k, mono in enumerate(monos)}
    values, cols = [], []
    for mono in monos:
        factors = [i for i, a in enumerate(mono) for _ in range(a)]
        values.append(sum((chi.values[i] for i in factors), Fraction(0)))
        if chi.basis is not None:
            poly = {(0,) * n: Fraction(1)}
            for i in factors:
                poly = _mul_linear(poly, chi.basis[i])
            col = [Fraction(0)] * len(monos)
            for exp, c in poly.items():
                col[index[exp]] += c
            cols.append(tuple(col))
    return FiniteDimNorm(tuple(values), tuple(cols) if chi.basis is not None else None)


def _mul_linear(poly: dict, lin: Vector) -> dict:
    out: dict = {}
    for exp, c in poly.items():
        for j, a in enumerate(lin):
            if a == 0:
                continue
            e = list(exp)
            e[j] += 1
            e = tuple(e)
            out[e] = out.get(e, Fraction(0)) + c * a
    return out

