"""Exception types raised by the subsys library."""


class SubsysError(Exception):
    """Base class for all library errors."""


class NotHermitian(SubsysError):
    """Input matrix deviates from its adjoint beyond tolerance."""


class ClusteringAmbiguous(SubsysError):
    """Eigenvalue clusters overlap and cannot be separated at tolerance."""


class EmptyBasis(SubsysError):
    """A span operation received an empty basis."""


class RetriesExhausted(SubsysError):
    """A randomized procedure failed its typicality condition repeatedly."""


class NotIsotypic(SubsysError):
    """Intertwiner space dimension is inconsistent with the multiplicity."""


class NotUniqueFixedPoint(SubsysError):
    """The channel has more than one fixed point; spanning hypothesis fails."""


class NoPositiveFixedPoint(SubsysError):
    """No strictly positive fixed point could be extracted."""


class NotKroneckerFactorable(SubsysError):
    """A Gram matrix does not factor as a Kronecker product at tolerance."""


class LambdaTooLarge(SubsysError):
    """The completion operator I - lambda*sum(E^dag E) is not PSD."""


class DimensionMismatch(SubsysError):
    """Operator and encoding dimensions are inconsistent."""


class RowSpanDeficient(SubsysError):
    """The rows of the F maps do not span the full candidate space."""


class InfeasibleConstraints(SubsysError):
    """The elimination constraints admit only the zero coefficient vector."""


class EnvironmentTooSmall(SubsysError):
    """The purifying environment is smaller than system A; no solution."""


class NotPreserving(SubsysError):
    """An encoder/error/decoder triple does not preserve quantum information."""

    def __init__(self, message, encoder_index=None, error_index=None, witness=None):
        super().__init__(message)
        self.encoder_index = encoder_index
        self.error_index = error_index
        self.witness = witness


class OperatorFileError(SubsysError):
    """An operator or encoding file failed to parse or validate."""
