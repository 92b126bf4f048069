"""Exact computations with non-Archimedean norms on finite-dimensional spaces
and toric section rings.

Submodules: ``fdnorm`` (norms on vector spaces), ``polytope`` (rational
polytopes and piecewise-linear concave functions), ``toricnorm`` (toric norms),
``energy`` (energy, energy dual, minimum norm), ``cli``.
"""

__version__ = "0.1.0"

from ._exact import INFINITY, Enclosure  # noqa: E402

__all__ = ["INFINITY", "Enclosure", "__version__"]
