"""Exception types shared across the toolkit."""


class UnitalNormError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(UnitalNormError):
    """Coordinate vector or matrix does not conform to the algebra dimension."""


class NotAUnit(UnitalNormError):
    """Element has no (numerically trustworthy) inverse.

    Carries a ``diagnostic`` attribute with the offending condition number or
    denominator magnitude.
    """

    def __init__(self, message, diagnostic=None):
        super().__init__(message)
        self.diagnostic = diagnostic


class MissingRepresentation(UnitalNormError):
    """Operation needs a matrix representation that was not supplied."""


class SamplingFailure(UnitalNormError):
    """Unit resampling failed too many times in a row."""


class NoNormalizedSlice(UnitalNormError):
    """The affine normalization constraint is infeasible on the family."""


class NotSymmetric(UnitalNormError):
    """A map expected to be self-adjoint came out asymmetric."""


class PathCrossesNonUnits(UnitalNormError):
    """An integration node failed the unit test."""


class QuadratureNonConvergent(UnitalNormError):
    """Adaptive quadrature exhausted its subdivision budget."""


class KernelComponent(UnitalNormError):
    """Element has a component in the kernel of the proto-norm."""


class DecompositionCheckFailed(UnitalNormError):
    """Sphere point of a unital decomposition failed its norm-1 check."""


class OutOfDomain(UnitalNormError):
    """Point lies outside the stated validity domain of a closed form."""


class NonPositiveLeading(UnitalNormError):
    """Toeplitz log-series form requires a positive leading coefficient."""


class NotAnIdeal(UnitalNormError):
    """Candidate subspace is not closed under two-sided multiplication."""


class IdealContainsUnity(UnitalNormError):
    """Quotient by an ideal containing the identity is degenerate."""


class DeltaOutOfRange(UnitalNormError):
    """Discrepancy target is outside the achievable residual range."""


class DegenerateCoordinate(UnitalNormError):
    """A retained coordinate vanished where a nonzero value is required."""


class FamilyVerificationError(UnitalNormError):
    """A solved family member failed its defining identity at fresh samples."""


class SpeedOutOfRange(UnitalNormError):
    """Boost speed must satisfy |v| < 1."""


class UsageError(UnitalNormError):
    """Bad command line arguments."""
