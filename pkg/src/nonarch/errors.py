"""Exception hierarchy.

Input and invariant violations are ``ValueError`` subclasses raised where they
are detected (``PolytopeError``, ``MeasureError``, ``DimensionError``...).
``ComputationError`` marks failures of a well-formed computation; the CLI maps
it to exit code 2.
"""


class ComputationError(RuntimeError):
    pass


class UnsupportedModeError(ComputationError):
    pass


class ConvergenceError(ComputationError):
    pass


class CarrierMismatchError(ValueError):
    pass
