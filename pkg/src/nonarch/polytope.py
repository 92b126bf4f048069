"""Exact rational polyhedral geometry in dimension <= 3.

Polytopes carry both a vertex list and a facet inequality list ``a.x <= b``.
Cells of piecewise-linear functions are produced by exact halfspace clipping,
volumes by a fan triangulation from the lexicographically smallest vertex,
and concave envelopes by gift-wrapping the upper hull one ridge at a time.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence, Union

from ._exact import Q, affine_rank, det, dot, qvec, rank, rref

Point = tuple[Fraction, ...]
Halfspace = tuple[Point, Fraction]

MAX_DIM = 3


class PolytopeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# small helpers


def _sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def _add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def _mul(t, u):
    return tuple(t * a for a in u)


def _normalize_halfspace(a: Sequence[Fraction], b: Fraction) -> Halfspace:
    entries = list(a) + [b]
    lcm = 1
    for x in entries:
        lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    ints = [int(x * lcm) for x in entries]
    g = 0
    for x in ints:
        g = math.gcd(g, abs(x))
    if g == 0:
        raise PolytopeError("zero halfspace normal")
    ints = [x // g for x in ints]
    return tuple(Fraction(x) for x in ints[:-1]), Fraction(ints[-1])


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _hull(points: Sequence[Point]) -> tuple[list[Point], list[Halfspace]]:
    """Vertices and facets of conv(points); the points must span R^n."""
    pts = sorted(set(points))
    n = len(pts[0])
    if n > MAX_DIM:
        raise PolytopeError(f"dimension {n} exceeds the supported maximum {MAX_DIM}")
    if affine_rank(pts) < n:
        raise PolytopeError("points do not span a full-dimensional polytope")
    if n == 1:
        lo, hi = pts[0], pts[-1]
        return [lo, hi], [((Fraction(-1),), -lo[0]), ((Fraction(1),), hi[0])]
    if n == 2:
        verts = _hull2d(pts)
        facets = []
        for p, q in zip(verts, verts[1:] + verts[:1]):
            a = (q[1] - p[1], p[0] - q[0])
            facets.append(_normalize_halfspace(a, dot(a, p)))
        return verts, facets
    return _hull3d(pts)


def _hull2d(pts: list[Point]) -> list[Point]:
    """Andrew's monotone chain; counter-clockwise, collinear points dropped."""

    def turn(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and turn(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and turn(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _hull3d(pts: list[Point]) -> tuple[list[Point], list[Halfspace]]:
    facets = set()
    for i, j, k in itertools.combinations(range(len(pts)), 3):
        nrm = _cross(_sub(pts[j], pts[i]), _sub(pts[k], pts[i]))
        if not any(nrm):
            continue
        b = dot(nrm, pts[i])
        side = [dot(nrm, p) - b for p in pts]
        if all(s <= 0 for s in side):
            facets.add(_normalize_halfspace(nrm, b))
        elif all(s >= 0 for s in side):
            facets.add(_normalize_halfspace(tuple(-x for x in nrm), -b))
    facets = sorted(facets)
    verts = []
    for p in pts:
        tight = [a for a, b in facets if dot(a, p) == b]
        if tight and rank([list(a) for a in tight]) == 3:
            verts.append(p)
    return verts, facets


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalPolytope:
    """Full-dimensional convex polytope in Q^n, n <= 3.

    Constructing from points computes the hull, so ``vertices`` is always
    irredundant and sorted lexicographically.
    """

    vertices: tuple[Point, ...]
    halfspaces: tuple[Halfspace, ...] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        pts = [qvec(p) for p in self.vertices]
        if not pts:
            raise PolytopeError("empty vertex list")
        if self.halfspaces is None:
            verts, facets = _hull(pts)
        else:
            verts, facets = pts, list(self.halfspaces)
        object.__setattr__(self, "vertices", tuple(sorted(verts)))
        object.__setattr__(self, "halfspaces", tuple(sorted(facets)))

    @classmethod
    def from_points(cls, points: Iterable[Sequence]) -> "RationalPolytope":
        return cls(tuple(qvec(p) for p in points))

    @classmethod
    def interval(cls, a, b) -> "RationalPolytope":
        return cls(((Q(a),), (Q(b),)))

    @classmethod
    def box(cls, lows: Sequence, highs: Sequence) -> "RationalPolytope":
        return cls(tuple(itertools.product(*[(Q(a), Q(b)) for a, b in zip(lows, highs)])))

    @classmethod
    def unit_cube(cls, n: int) -> "RationalPolytope":
        return cls.box([0] * n, [1] * n)

    @classmethod
    def standard_simplex(cls, n: int) -> "RationalPolytope":
        pts = [tuple(Fraction(0) for _ in range(n))]
        pts += [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
        return cls(tuple(pts))

    @classmethod
    def from_halfspaces(cls, halfspaces: Iterable[tuple[Sequence, object]]) -> "RationalPolytope":
        hs = [(qvec(a), Q(b)) for a, b in halfspaces]
        n = len(hs[0][0])
        pts = set()
        for combo in itertools.combinations(hs, n):
            rows = [list(a) for a, _ in combo]
            if rank(rows) < n:
                continue
            red, _ = rref([list(a) + [b] for a, b in combo])
            x = tuple(r[n] for r in red)
            if all(dot(a, x) <= b for a, b in hs):
                pts.add(x)
        if not pts:
            raise PolytopeError("halfspaces define an empty or unbounded set")
        return cls(tuple(pts))

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    def contains(self, x: Sequence) -> bool:
        x = qvec(x)
        return all(dot(a, x) <= b for a, b in self.halfspaces)

    def dilate(self, m) -> "RationalPolytope":
        m = Q(m)
        if m <= 0:
            raise PolytopeError("dilation factor must be positive")
        return RationalPolytope(tuple(_mul(m, v) for v in self.vertices),
                                tuple((a, m * b) for a, b in self.halfspaces))

    def translate(self, t: Sequence) -> "RationalPolytope":
        t = qvec(t)
        return RationalPolytope(tuple(_add(v, t) for v in self.vertices),
                                tuple((a, b + dot(a, t)) for a, b in self.halfspaces))

    def support(self, xi: Sequence) -> Fraction:
        """max over P of <xi, x>."""
        xi = qvec(xi)
        return max(dot(xi, v) for v in self.vertices)

    def min_linear(self, xi: Sequence) -> Fraction:
        xi = qvec(xi)
        return min(dot(xi, v) for v in self.vertices)

    # -- combinatorics ----------------------------------------------------

    @cached_property
    def _tight(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(k for k, (a, b) in enumerate(self.halfspaces) if dot(a, v) == b)
                     for v in self.vertices)

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        n = self.dim
        if n == 1:
            return ((0, 1),)
        out = []
        for i, j in itertools.combinations(range(len(self.vertices)), 2):
            common = self._tight[i] & self._tight[j]
            if len(common) >= n - 1 and (
                    n == 2 or rank([list(self.halfspaces[k][0]) for k in common]) >= n - 1):
                out.append((i, j))
        return tuple(out)

    def clip(self, a: Sequence, b) -> Optional["RationalPolytope"]:
        """Intersection with ``a.x <= b``; ``None`` if not full-dimensional."""
        a, b = qvec(a), Q(b)
        vals = [dot(a, v) - b for v in self.vertices]
        if all(s <= 0 for s in vals):
            return self
        if all(s >= 0 for s in vals):
            return None
        pts = {v for v, s in zip(self.vertices, vals) if s <= 0}
        for i, j in self.edges:
            si, sj = vals[i], vals[j]
            if (si < 0 < sj) or (sj < 0 < si):
                vi, vj = self.vertices[i], self.vertices[j]
                t = si / (si - sj)
                pts.add(_add(vi, _mul(t, _sub(vj, vi))))
        pts = sorted(pts)
        n = self.dim
        if len(pts) <= n or affine_rank(pts) < n:
            return None
        hs = list(self.halfspaces)
        if any(a):
            hs.append(_normalize_halfspace(a, b))
        keep = []
        for h in set(hs):
            tight = [p for p in pts if dot(h[0], p) == h[1]]
            if len(tight) >= n and affine_rank(tight) == n - 1:
                keep.append(h)
        return RationalPolytope(tuple(pts), tuple(keep))

    def intersect(self, other: "RationalPolytope") -> Optional["RationalPolytope"]:
        out: Optional[RationalPolytope] = self
        for a, b in other.halfspaces:
            out = out.clip(a, b)
            if out is None:
                return None
        return out

    @cached_property
    def _facet_sets(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(i for i, t in enumerate(self._tight) if k in t)
                     for k in range(len(self.halfspaces)))

    def _triangulate_face(self, face: frozenset, k: int) -> list[tuple[int, ...]]:
        if len(face) == k + 1:
            return [tuple(sorted(face))]
        v0 = min(face)  # vertices are sorted, so the smallest index is lexmin
        subfaces = set()
        for fs in self._facet_sets:
            sub = face & fs
            if sub != face and len(sub) >= k and v0 not in sub:
                if affine_rank([self.vertices[i] for i in sub]) == k - 1:
                    subfaces.add(sub)
        out = []
        for sub in sorted(subfaces, key=sorted):
            for s in self._triangulate_face(sub, k - 1):
                out.append((v0,) + s)
        return out

    @cached_property
    def simplices(self) -> tuple[tuple[Point, ...], ...]:
        """Fan triangulation from the lexicographically smallest vertex."""
        idx = self._triangulate_face(frozenset(range(len(self.vertices))), self.dim)
        return tuple(tuple(self.vertices[i] for i in s) for s in idx)

    @cached_property
    def volume(self) -> Fraction:
        return sum((simplex_volume(s) for s in self.simplices), Fraction(0))

    @cached_property
    def barycenter(self) -> Point:
        n = self.dim
        acc = [Fraction(0)] * n
        for s in self.simplices:
            w = simplex_volume(s)
            c = _centroid(s)
            for i in range(n):
                acc[i] += w * c[i]
        return tuple(x / self.volume for x in acc)

    def lattice_points(self, m: int = 1) -> list[tuple[int, ...]]:
        """Integer points of m*P in lexicographic order."""
        if m < 1:
            raise PolytopeError("dilation must be a positive integer")
        ranges = []
        for i in range(self.dim):
            lo = min(v[i] for v in self.vertices) * m
            hi = max(v[i] for v in self.vertices) * m
            ranges.append(range(math.ceil(lo), math.floor(hi) + 1))
        out = []
        for x in itertools.product(*ranges):
            if all(dot(a, x) <= m * b for a, b in self.halfspaces):
                out.append(x)
        return out

    def is_lattice(self) -> bool:
        return all(c.denominator == 1 for v in self.vertices for c in v)


def volume(P: RationalPolytope) -> Fraction:
    return P.volume


def barycenter(P: RationalPolytope) -> Point:
    return P.barycenter


def lattice_points(P: RationalPolytope, m: int = 1) -> list[tuple[int, ...]]:
    return P.lattice_points(m)


def simplex_volume(s: Sequence[Point]) -> Fraction:
    n = len(s) - 1
    d = det([list(_sub(v, s[0])) for v in s[1:]])
    return abs(d) / math.factorial(n)


def _centroid(s: Sequence[Point]) -> Point:
    k = len(s)
    return tuple(sum(c, Fraction(0)) / k for c in zip(*s))


def _complete_homogeneous(values: Sequence[Fraction], p: int) -> Fraction:
    h = [Fraction(1)] + [Fraction(0)] * p
    for a in values:
        for k in range(1, p + 1):
            h[k] += a * h[k - 1]
    return h[p]


def integrate_affine_power(s: Sequence[Point], values: Sequence[Fraction], p: int) -> Fraction:
    """Exact integral of ``l^p`` over the simplex ``s``, where ``l`` is affine with
    the given vertex values."""
    n = len(s) - 1
    vol = simplex_volume(s)
    coef = Fraction(math.factorial(n) * math.factorial(p), math.factorial(n + p))
    return vol * coef * _complete_homogeneous(values, p)


# ---------------------------------------------------------------------------
# Piecewise-linear functions


@dataclass(frozen=True, order=True)
class AffinePiece:
    """The affine function ``alpha -> <slope, alpha> + const``."""

    slope: Point
    const: Fraction

    def __post_init__(self):
        object.__setattr__(self, "slope", qvec(self.slope))
        object.__setattr__(self, "const", Q(self.const))

    def __call__(self, alpha: Sequence) -> Fraction:
        return dot(self.slope, alpha) + self.const


def _piece_order(p: AffinePiece):
    return tuple(-x for x in p.slope), p.const


def _as_pieces(pieces) -> list[AffinePiece]:
    out = []
    for p in pieces:
        out.append(p if isinstance(p, AffinePiece) else AffinePiece(*p))
    return out


def _cell(P: RationalPolytope, j: int, pieces: Sequence[AffinePiece]) -> Optional[RationalPolytope]:
    cell: Optional[RationalPolytope] = P
    pj = pieces[j]
    for k, pk in enumerate(pieces):
        if k == j:
            continue
        # pj <= pk  <=>  (xi_j - xi_k).alpha <= c_k - c_j
        a = _sub(pj.slope, pk.slope)
        b = pk.const - pj.const
        if not any(a):
            if b < 0:
                return None
            continue
        cell = cell.clip(a, b)
        if cell is None:
            return None
    return cell


@dataclass(frozen=True)
class ConcavePLFunction:
    """Min of finitely many affine pieces on a polytope.

    Pieces that are not active on a full-dimensional cell are dropped at
    construction; the remaining pieces are stored in a canonical order
    (slope decreasing lexicographically).
    """

    P: RationalPolytope
    pieces: tuple[AffinePiece, ...]

    def __post_init__(self):
        pieces = _as_pieces(self.pieces)
        if not pieces:
            raise PolytopeError("need at least one affine piece")
        n = self.P.dim
        if any(len(p.slope) != n for p in pieces):
            raise PolytopeError("piece slopes must match the polytope dimension")
        best: dict = {}
        for p in pieces:
            if p.slope not in best or p.const < best[p.slope].const:
                best[p.slope] = p
        cand = sorted(best.values(), key=_piece_order)
        cells = [_cell(self.P, j, cand) for j in range(len(cand))]
        kept = [(p, c) for p, c in zip(cand, cells) if c is not None]
        object.__setattr__(self, "pieces", tuple(p for p, _ in kept))
        # the cells of the kept pieces are unchanged by dropping the others
        object.__setattr__(self, "_cells", tuple(kept))

    @classmethod
    def constant(cls, P: RationalPolytope, c=0) -> "ConcavePLFunction":
        return cls(P, (AffinePiece((Fraction(0),) * P.dim, Q(c)),))

    @classmethod
    def linear(cls, P: RationalPolytope, slope: Sequence, const=0) -> "ConcavePLFunction":
        return cls(P, (AffinePiece(slope, const),))

    def __call__(self, alpha: Sequence) -> Fraction:
        alpha = qvec(alpha)
        return min(p(alpha) for p in self.pieces)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConcavePLFunction):
            return NotImplemented
        return self.P == other.P and self.pieces == other.pieces

    def __hash__(self) -> int:
        return hash((self.P.vertices, self.pieces))

    @property
    def cells(self) -> tuple[tuple[AffinePiece, RationalPolytope], ...]:
        return self._cells  # type: ignore[attr-defined]

    @cached_property
    def vertex_values(self) -> tuple[tuple[Point, Fraction], ...]:
        """Vertices of the cell subdivision with the function values there."""
        pts = sorted({v for _, c in self.cells for v in c.vertices})
        return tuple((v, self(v)) for v in pts)

    def __add__(self, c) -> "ConcavePLFunction":
        c = Q(c)
        return ConcavePLFunction(self.P, tuple(AffinePiece(p.slope, p.const + c) for p in self.pieces))

    def scaled(self, t) -> "ConcavePLFunction":
        t = Q(t)
        if t < 0:
            raise PolytopeError("negative scaling breaks concavity")
        return ConcavePLFunction(self.P, tuple(AffinePiece(_mul(t, p.slope), t * p.const)
                                               for p in self.pieces))

    def minimum(self, other: "ConcavePLFunction") -> "ConcavePLFunction":
        _same_carrier(self.P, other.P)
        return ConcavePLFunction(self.P, self.pieces + other.pieces)

    @property
    def max_value(self) -> Fraction:
        return max(y for _, y in self.vertex_values)

    @property
    def min_value(self) -> Fraction:
        return min(y for _, y in self.vertex_values)


def _same_carrier(P: RationalPolytope, P2: RationalPolytope):
    if P != P2:
        raise PolytopeError("functions live on different polytopes")


@dataclass(frozen=True)
class ConvexPLFunction:
    """Max of finitely many affine pieces on all of Q^n (irredundant)."""

    pieces: tuple[AffinePiece, ...]

    def __post_init__(self):
        pieces = _as_pieces(self.pieces)
        if not pieces:
            raise PolytopeError("need at least one affine piece")
        best: dict = {}
        for p in pieces:
            if p.slope not in best or p.const > best[p.slope].const:
                best[p.slope] = p
        cand = list(best.values())
        keep = upper_hull_vertices([p.slope for p in cand], [p.const for p in cand])
        object.__setattr__(self, "pieces",
                           tuple(sorted((cand[i] for i in keep), key=_piece_order)))

    def __call__(self, xi: Sequence) -> Fraction:
        xi = qvec(xi)
        return max(p(xi) for p in self.pieces)


# ---------------------------------------------------------------------------
# Upper hulls


@dataclass(frozen=True)
class UpperFacet:
    slope: Point
    const: Fraction
    support: tuple[int, ...]  # indices of sample points lying on the facet
    vertices: tuple[int, ...]  # the subset that are vertices of the facet


def _dedupe_samples(alphas, ys):
    best: dict = {}
    for a, y in zip(alphas, ys):
        if a not in best or y > best[a]:
            best[a] = y
    keys = sorted(best)
    return keys, [best[k] for k in keys]


def upper_hull(alphas: Sequence[Point], ys: Sequence[Fraction]) -> list[UpperFacet]:
    """Facets of the upper convex hull of the lifted points ``(alpha_i, y_i)``.

    The ``alphas`` must affinely span Q^n. Indices in the result refer to the
    deduplicated, sorted sample list returned alongside by ``_dedupe_samples``;
    callers use ``upper_hull_samples`` to get that list.
    """
    alphas, ys = _dedupe_samples([qvec(a) for a in alphas], [Q(y) for y in ys])
    return _upper_hull(alphas, ys)


def upper_hull_samples(alphas, ys):
    alphas, ys = _dedupe_samples([qvec(a) for a in alphas], [Q(y) for y in ys])
    return alphas, ys, _upper_hull(alphas, ys)


def _upper_hull(alphas: list[Point], ys: list[Fraction]) -> list[UpperFacet]:
    n = len(alphas[0])
    if affine_rank(alphas) < n:
        raise PolytopeError("sample points do not span a full-dimensional set")
    if n == 1:
        return _upper_hull_1d(alphas, ys)
    start = _one_upper_plane(alphas, ys)
    seen = {start}
    queue = [start]
    facets = []
    while queue:
        xi, c = queue.pop(0)
        on = [i for i, (a, y) in enumerate(zip(alphas, ys)) if dot(xi, a) + c == y]
        G = RationalPolytope.from_points([alphas[i] for i in on])
        gverts = set(G.vertices)
        facets.append(UpperFacet(xi, c, tuple(on), tuple(i for i in on if alphas[i] in gverts)))
        for a, b in G.halfspaces:
            s = [dot(a, al) - b for al in alphas]
            cand = [i for i in range(len(alphas)) if s[i] > 0]
            if not cand:
                continue
            t = max((ys[i] - dot(xi, alphas[i]) - c) / s[i] for i in cand)
            new = (_add(xi, _mul(t, a)), c - t * b)
            if new not in seen:
                seen.add(new)
                queue.append(new)
    facets.sort(key=lambda f: (tuple(-x for x in f.slope), f.const))
    return facets


def _upper_hull_1d(alphas, ys) -> list[UpperFacet]:
    hull: list[int] = []
    for i in range(len(alphas)):
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            # pop a if it is on or below the chord from o to i
            lhs = (ys[a] - ys[o]) * (alphas[i][0] - alphas[o][0])
            rhs = (ys[i] - ys[o]) * (alphas[a][0] - alphas[o][0])
            if lhs <= rhs:
                hull.pop()
            else:
                break
        hull.append(i)
    facets = []
    for i, j in zip(hull, hull[1:]):
        s = (ys[j] - ys[i]) / (alphas[j][0] - alphas[i][0])
        c = ys[i] - s * alphas[i][0]
        on = tuple(k for k in range(i, j + 1) if s * alphas[k][0] + c == ys[k])
        facets.append(UpperFacet((s,), c, on, (i, j)))
    return facets


def _one_upper_plane(alphas, ys) -> tuple[Point, Fraction]:
    """Some facet plane of the upper hull, found by rotating about a lower-dimensional one."""
    n = len(alphas[0])
    if n == 1:
        f = _upper_hull_1d(alphas, ys)[0]
        return f.slope, f.const
    D = RationalPolytope.from_points(alphas)
    a, b = D.halfspaces[0]
    on = [i for i, al in enumerate(alphas) if dot(a, al) == b]
    k = next(i for i, x in enumerate(a) if x != 0)
    proj = [tuple(x for j, x in enumerate(alphas[i]) if j != k) for i in on]
    p_alphas, p_ys = _dedupe_samples(proj, [ys[i] for i in on])
    xi_f, c_f = _one_upper_plane(p_alphas, p_ys)
    xi_l = tuple(xi_f[:k]) + (Fraction(0),) + tuple(xi_f[k:])
    # rotate L + t*(b - a.alpha) until it touches a point off the facet
    s = [b - dot(a, al) for al in alphas]
    cand = [i for i in range(len(alphas)) if s[i] > 0]
    t = max((ys[i] - dot(xi_l, alphas[i]) - c_f) / s[i] for i in cand)
    return _sub(xi_l, _mul(t, a)), c_f + t * b


def upper_hull_vertices(alphas: Sequence[Point], ys: Sequence[Fraction]) -> list[int]:
    """Indices (into the given lists) of points that are vertices of the upper hull.

    Handles lower-dimensional point sets by working in coordinates of their
    affine hull. Duplicate alphas must be removed by the caller.
    """
    alphas = [qvec(a) for a in alphas]
    ys = [Q(y) for y in ys]
    if len(set(alphas)) != len(alphas):
        raise PolytopeError("duplicate sample points")
    r = affine_rank(alphas)
    if r == 0:
        return [0]
    if r < len(alphas[0]):
        diffs = [list(_sub(a, alphas[0])) for a in alphas[1:]]
        coords = _independent_coords(diffs, r)
        alphas_p = [tuple(a[i] for i in coords) for a in alphas]
    else:
        alphas_p = alphas
    order = sorted(range(len(alphas_p)), key=lambda i: alphas_p[i])
    s_alphas = [alphas_p[i] for i in order]
    s_ys = [ys[i] for i in order]
    facets = _upper_hull(s_alphas, s_ys)
    verts = sorted({order[i] for f in facets for i in f.vertices})
    return verts


def _independent_coords(diffs, r) -> list[int]:
    """Coordinates on which the projection of the affine hull is injective."""
    n = len(diffs[0])
    chosen: list[int] = []
    for i in range(n):
        trial = chosen + [i]
        if rank([[d[j] for j in trial] for d in diffs]) == len(trial):
            chosen = trial
        if len(chosen) == r:
            break
    return chosen


# ---------------------------------------------------------------------------
# Transforms


def legendre(g: ConcavePLFunction) -> ConvexPLFunction:
    """``xi -> sup_{alpha in P} <alpha, xi> + g(alpha)`` as an irredundant max."""
    return ConvexPLFunction(tuple(AffinePiece(v, y) for v, y in g.vertex_values))


def support_function(P: RationalPolytope) -> ConvexPLFunction:
    return legendre(ConcavePLFunction.constant(P, 0))


def inverse_legendre(G: ConvexPLFunction, P: Optional[RationalPolytope] = None) -> ConcavePLFunction:
    """``alpha -> inf_xi G(xi) - <alpha, xi>`` on the convex hull of G's slopes."""
    return biconjugate([(p.slope, p.const) for p in G.pieces], P)


Samples = Sequence[tuple[Sequence, object]]


def biconjugate(u: Union[ConcavePLFunction, Samples],
                P: Optional[RationalPolytope] = None) -> ConcavePLFunction:
    """Least concave majorant, as a concave PL function.

    ``u`` is either a ``ConcavePLFunction`` (returned unchanged up to
    normalization) or a list of ``(alpha, value)`` samples whose convex hull
    must be the carrier ``P``.
    """
    if isinstance(u, ConcavePLFunction):
        P = u.P
        samples = list(u.vertex_values)
    else:
        samples = [(qvec(a), Q(y)) for a, y in u]
    alphas = [a for a, _ in samples]
    if not alphas:
        raise PolytopeError("no samples")
    n = len(alphas[0])
    if len(set(alphas)) <= n or affine_rank(sorted(set(alphas))) < n:
        raise PolytopeError("need n+1 affinely independent sample points")
    hull = RationalPolytope.from_points(alphas)
    if P is None:
        P = hull
    elif hull != P:
        raise PolytopeError("samples do not span the carrier polytope")
    facets = upper_hull(alphas, [y for _, y in samples])
    return ConcavePLFunction(P, tuple(AffinePiece(f.slope, f.const) for f in facets))


def active_cells(g: ConcavePLFunction) -> list[tuple[AffinePiece, RationalPolytope]]:
    return list(g.cells)


def integrate_pl(P: RationalPolytope, g: ConcavePLFunction, normalized: bool = False) -> Fraction:
    """Exact integral of g over P (divided by vol P when ``normalized``)."""
    _same_carrier(P, g.P)
    total = Fraction(0)
    for piece, cell in g.cells:
        total += cell.volume * piece(cell.barycenter)
    return total / P.volume if normalized else total


def refine(g: ConcavePLFunction, h: ConcavePLFunction):
    """Common refinement: yields ``(cell, piece_of_g, piece_of_h)`` triples."""
    _same_carrier(g.P, h.P)
    for pg, cg in g.cells:
        for ph, ch in h.cells:
            c = cg.intersect(ch)
            if c is not None:
                yield c, pg, ph


def split_by_sign(cell: RationalPolytope, f: AffinePiece):
    """Parts of ``cell`` where the affine ``f`` is >= 0 and <= 0 (either may be None)."""
    if not any(f.slope):
        return (cell, None) if f.const >= 0 else (None, cell)
    neg = cell.clip(f.slope, -f.const)          # f <= 0
    pos = cell.clip(_mul(-1, f.slope), f.const)  # f >= 0
    return pos, neg


def integrate_abs_power(cell: RationalPolytope, f: AffinePiece, p: int) -> Fraction:
    """Exact integral of |f|^p over cell for affine f and integer p >= 1."""
    total = Fraction(0)
    pos, neg = split_by_sign(cell, f)
    for part, sign in ((pos, 1), (neg, -1)):
        if part is None:
            continue
        for s in part.simplices:
            total += integrate_affine_power(s, [sign * f(v) for v in s], p)
    return total


def affine_pushforward_ramps(cell: RationalPolytope, f: AffinePiece):
    """CDF contributions of Lebesgue measure on ``cell`` pushed forward by ``f``.

    Returns ``(ramps, atoms)`` in the format of ``PLMeasure1D.from_contributions``
    (unnormalized). Supported for n <= 2.
    """
    n = cell.dim
    if n > 2:
        raise PolytopeError("exact pushforward CDFs are implemented for n <= 2")
    ramps, atoms = [], []
    if not any(f.slope):
        return ramps, [(f.const, cell.volume)]
    for s in cell.simplices:
        vals = sorted(f(v) for v in s)
        vol = simplex_volume(s)
        if n == 1:
            a, c = vals
            ramps.append((a, c, (-a * vol / (c - a), vol / (c - a))))
            continue
        a, b, c = vals
        if a < b:
            k = vol / ((b - a) * (c - a))
            ramps.append((a, b, (k * a * a, -2 * k * a, k)))
        if b < c:
            k = vol / ((c - a) * (c - b))
            base = vol * (b - a) / (c - a)
            # vol * (1 - (c-t)^2 / ((c-a)(c-b))) minus the part already counted
            ramps.append((b, c, (vol - k * c * c - base, 2 * k * c, -k)))
    return ramps, atoms
