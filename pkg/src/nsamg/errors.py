"""Exception types shared across the package."""


class NsamgError(Exception):
    """Base class for all structured errors raised by nsamg."""


class NonFinite(NsamgError):
    """A matrix or vector contains NaN or Inf entries."""


class NonHermitian(NsamgError):
    """A matrix violates the Hermitian symmetry precondition."""


class NotHPD(NsamgError):
    """A matrix required to be Hermitian positive definite is not."""


class Singular(NsamgError):
    """A linear solve hit a pivot below the singularity threshold."""


class ConvergenceFailure(NsamgError):
    """An underlying eigenvalue iteration did not converge."""


class DimensionMismatch(NsamgError):
    """Operands have incompatible shapes."""


class NegativeSpectrum(NsamgError):
    """A spectrum promised to be nonnegative contains an eigenvalue
    below the declared zero threshold."""


class ComplexSpectrum(NsamgError):
    """A spectrum promised to be real carries imaginary parts above
    tolerance, so min/max eigenvalue queries are undefined."""


class NotBNormal(NsamgError):
    """An operation requires a weighted-normal matrix and got one that
    fails the commutator test."""


class NotBOrthogonal(NsamgError):
    """An operation requires a weighted-self-adjoint matrix or
    projection and got one that fails the adjoint test."""


class RankDeficientTransfer(NsamgError):
    """A transfer operator does not have full column rank."""


class SingularCoarseMatrix(NsamgError):
    """The coarse matrix R^H A P is singular or too ill conditioned."""


class SingularSmoother(NsamgError):
    """The smoother matrix is singular or too ill conditioned."""


class SmoothingAssumptionViolated(NsamgError):
    """The weighted norm of the smoothing error operator is >= 1."""


class SingularErrorOperator(NsamgError):
    """A smoothing error operator required to be nonsingular is not."""


class HypothesisViolated(NsamgError):
    """A sharp-characterization hypothesis fails; the name of the
    offending hypothesis is carried in the message."""


class NestingViolated(NsamgError):
    """Coarse-space comparison requires nested ranges and got
    non-nested ones."""


class AlphaOutOfRange(NsamgError):
    """A per-level contraction constant is >= 1, so the multilevel
    bound does not apply at that level."""


class ZeroDiagonal(NsamgError):
    """A splitting smoother needs a nonzero diagonal and the matrix
    does not have one."""


class InvalidSpec(NsamgError):
    """A problem specification is malformed or unsupported."""


class InvalidSize(NsamgError):
    """A requested size (coarse dimension, level count, ...) is out of
    range."""


class ConfigError(NsamgError):
    """An experiment configuration file is invalid."""
