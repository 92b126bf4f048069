"""Monge-Ampere energy, its dual on discrete measures, and the minimum norm.

The energy dual of an atomic measure ``mu = sum m_j delta_{xi_j}`` is found by
semi-discrete optimal transport: maximize

    F(c) = int_P min_j (<xi_j, alpha> + c_j) dlambda_P - sum_j m_j c_j,

whose gradient in ``c_j`` is (mass of the j-th cell) - m_j. Iterates live in
binary64; every evaluation of F and of the cell masses is done by the exact
polyhedral kernel at rationalized weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ._exact import Q, dot, qvec
from .errors import ConvergenceError, UnsupportedModeError
from .measures import DiscreteMeasure, MeasureError
from .polytope import AffinePiece, ConcavePLFunction, RationalPolytope
from .toricnorm import ToricHomNorm, from_valuation, monge_ampere, quotient_d1, volume

DEFAULT_TOL = 1e-6
MAX_ITER = 10_000
MAX_DENOMINATOR = 10**6
_ARMIJO = 1e-4


def energy(chi: ToricHomNorm):
    """E of the Fubini-Study data of chi; in the toric model this is vol(chi)."""
    return volume(chi)


@dataclass(frozen=True)
class OTSolution:
    """Weights are reported with c_1 = 0."""

    atoms: tuple[tuple[Fraction, ...], ...]
    weights: tuple[float, ...]
    masses: tuple[float, ...]
    target: tuple[Fraction, ...]
    objective: float
    iterations: int
    residual: float

    def norm(self, P: RationalPolytope) -> ToricHomNorm:
        """The divisorial norm min_j(<xi_j, .> + c_j) at the reported weights."""
        pieces = tuple(AffinePiece(a, Fraction(w)) for a, w in zip(self.atoms, self.weights))
        return ToricHomNorm(ConcavePLFunction(P, pieces))


def _atoms(P: RationalPolytope, mu: DiscreteMeasure) -> list[tuple[Fraction, ...]]:
    out = []
    for a in mu.atoms:
        a = (a,) if not isinstance(a, tuple) else a
        if len(a) != P.dim:
            raise MeasureError(f"atom {a} does not live in dimension {P.dim}")
        out.append(qvec(a))
    return out


def cell_masses(P: RationalPolytope, atoms: Sequence, weights: Sequence[Fraction]) -> list[Fraction]:
    """Exact normalized volumes of the cells {j attains min_j <xi_j, .> + c_j}."""
    g = ConcavePLFunction(P, tuple(AffinePiece(a, c) for a, c in zip(atoms, weights)))
    # atoms are distinct, so slopes identify cells; dropped pieces have empty cells
    by_slope = {p.slope: cell.volume / P.volume for p, cell in g.cells}
    return [by_slope.get(tuple(a), Fraction(0)) for a in atoms]


def dual_objective(P: RationalPolytope, atoms: Sequence, masses: Sequence,
                   weights: Sequence) -> Fraction:
    """Exact F(c) at rational weights."""
    weights = [Q(w) if not isinstance(w, float) else Fraction(w) for w in weights]
    g = ConcavePLFunction(P, tuple(AffinePiece(a, c) for a, c in zip(atoms, weights)))
    integral = sum((cell.volume * p(cell.barycenter) for p, cell in g.cells), Fraction(0))
    return integral / P.volume - sum((Q(m) * c for m, c in zip(masses, weights)), Fraction(0))


def _rational(x: float) -> Fraction:
    return Fraction(x).limit_denominator(MAX_DENOMINATOR)


def energy_dual(P: RationalPolytope, mu: DiscreteMeasure, tol: float = DEFAULT_TOL,
                max_iter: int = MAX_ITER) -> tuple[float, OTSolution]:
    """E^vee(mu) by gradient ascent on the semi-discrete transport dual."""
    if P.dim > 2:
        raise UnsupportedModeError("energy dual is implemented for dimension <= 2")
    atoms = _atoms(P, mu)
    target = list(mu.masses)
    k = len(atoms)
    spread = max((P.support(a) - P.min_linear(a) for a in atoms), default=Fraction(0))
    damp = float(spread) / 16 or 1.0

    def evaluate(c: list[float]):
        cq = [_rational(x) for x in c]
        return cq, cell_masses(P, atoms, cq), dual_objective(P, atoms, target, cq)

    bary = P.barycenter
    c = [-float(dot(a, bary)) for a in atoms]
    c = [x - c[0] for x in c]
    it = 0
    step = 1.0
    while True:
        for _ in range(4 * 64):
            cq, mass, F = evaluate(c)
            empty = [j for j in range(k) if mass[j] == 0]
            if not empty:
                break
            for j in empty:
                c[j] -= damp
        else:
            raise ConvergenceError("could not give every atom a nonempty cell")
        grad = [float(m - t) for m, t in zip(mass, target)]
        residual = max(abs(x) for x in grad)
        if residual <= tol:
            break
        if it >= max_iter:
            raise ConvergenceError(f"no convergence after {max_iter} iterations "
                                   f"(mass residual {residual:.3g})")
        it += 1
        gn2 = sum(x * x for x in grad)
        while True:
            trial = [x + step * gx for x, gx in zip(c, grad)]
            trial = [x - trial[0] for x in trial]
            _, _, Ft = evaluate(trial)
            if float(Ft - F) >= _ARMIJO * step * gn2:
                c = trial
                step *= 2
                break
            step /= 2
            if step < 1e-14:
                raise ConvergenceError("line search failed to make progress")

    weights = tuple(float(x) for x in cq)
    exact_w = [Fraction(w) for w in weights]
    mass = cell_masses(P, atoms, exact_w)
    F = dual_objective(P, atoms, target, exact_w)
    residual = max(abs(float(m - t)) for m, t in zip(mass, target))
    if residual > tol:
        raise ConvergenceError(f"mass residual {residual:.3g} exceeds tolerance after rounding")
    shift = sum((t * P.min_linear(a) for a, t in zip(atoms, target)), Fraction(0))
    sol = OTSolution(tuple(atoms), weights, tuple(float(m) for m in mass), tuple(target),
                     float(F), it, residual)
    return float(F - shift), sol


def minimum_norm(chi: ToricHomNorm) -> Fraction:
    """||chi|| = E^vee(MA(chi)), via the closed form vol(chi) - sum_j lambda_P(cell_j)(c_j + min_P xi_j)."""
    if not chi.is_pl:
        raise UnsupportedModeError("minimum norm needs piecewise-linear data")
    P = chi.P
    corr = sum((cell.volume * (p.const + P.min_linear(p.slope)) for p, cell in chi.g.cells),
               Fraction(0))
    return volume(chi) - corr / P.volume


def minimum_norm_solver(chi: ToricHomNorm, tol: float = DEFAULT_TOL) -> float:
    """The same quantity recomputed as energy_dual(monge_ampere(chi))."""
    value, _ = energy_dual(chi.P, monge_ampere(chi), tol=tol)
    return value


def t_and_s_invariants(P: RationalPolytope, xi: Sequence) -> tuple[Fraction, Fraction]:
    """(T, S) of the toric valuation xi: max and mean of g_xi over P."""
    xi = qvec(xi)
    low = P.min_linear(xi)
    return P.support(xi) - low, dot(xi, P.barycenter) - low


def dirac_distance(P: RationalPolytope, v: Sequence, w: Sequence) -> Fraction:
    """d_1(delta_v, delta_w), realized as the translation-quotient d_1 of chi_v and chi_w."""
    return quotient_d1(from_valuation(P, v), from_valuation(P, w)).value


__all__ = ["OTSolution", "energy", "energy_dual", "dual_objective", "cell_masses",
           "minimum_norm", "minimum_norm_solver", "t_and_s_invariants", "dirac_distance",
           "DEFAULT_TOL", "MAX_ITER"]
