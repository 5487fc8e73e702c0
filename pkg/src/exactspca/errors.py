"""Exception types shared across the library."""


class ExactSpcaError(Exception):
    """Base class for every error raised by this package."""


class NotSymmetric(ExactSpcaError):
    """A matrix argument is not symmetric as stored."""


class NotPositiveSemidefinite(ExactSpcaError):
    """A pivot fell below the negativity tolerance during factorization."""


class NoConvergence(ExactSpcaError):
    """The eigensolver exceeded its sweep limit."""


class DimensionMismatch(ExactSpcaError):
    """An array has a shape incompatible with the configured dimensions."""


class InvalidCircuit(ExactSpcaError):
    """A circuit object does not describe a valid circuit of the digraph."""


class Degenerate(ExactSpcaError):
    """A zero hyperplane normal reached the arrangement enumerator."""


class InfeasibleFlow(ExactSpcaError):
    """A flow violates arc capacities or conservation."""


class InvalidParameters(ExactSpcaError):
    """Problem parameters (d, s, n) are outside the solvable range."""


class TooLarge(ExactSpcaError):
    """A brute-force enumeration would exceed its configured cap."""


class ParseError(ExactSpcaError):
    """An input file could not be parsed as a numeric matrix."""


class NotSquare(ExactSpcaError):
    """A covariance input file is not a square matrix."""


class AsymmetryTooLarge(ExactSpcaError):
    """A covariance input file is asymmetric beyond tolerance."""
