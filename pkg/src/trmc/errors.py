"""Exception types shared across the package.

Every detectable failure (degenerate coefficients, infeasible lifts,
malformed input files, exceeded size caps) raises a typed error; nothing
in the library aborts the interpreter or returns silent garbage.
"""


class TrmcError(Exception):
    """Base class for all package errors."""


class InputError(TrmcError):
    """Malformed scenario file or CLI arguments."""


class DegenerateError(TrmcError):
    """Coefficients outside the regular locus (vanishing discriminant data,
    zero constant term of a series denominator, evaluation at a pole)."""


class GeometryError(TrmcError):
    """Invalid polytope, triangulation or fan data."""


class CapExceededError(TrmcError):
    """A configured size cap (monomial space, candidate subsets) was hit."""


class ReconstructionError(TrmcError):
    """Rational-function reconstruction could not fit the samples."""
