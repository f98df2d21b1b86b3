"""Exception hierarchy.

Everything a caller can trigger with bad input derives from
:class:`ValidationError` (CLI exit code 2); budget overruns raise
:class:`ResourceError` (exit code 3).
"""


class MosaicDoublonError(Exception):
    """Base class for all package errors."""


class ValidationError(MosaicDoublonError, ValueError):
    """A precondition on parameters or inputs is violated."""


class ConfigurationError(ValidationError):
    """Inconsistent combination of specs (e.g. sector vs. emitter count)."""


class UnsupportedKappaError(ValidationError):
    """No closed-form mobility edge exists for this mosaic period."""


class ResonanceError(ValidationError):
    """The emitter pair frequency does not hit the doublon band."""


class BranchCutError(ValidationError):
    """Energy lies inside the scattering continuum at this momentum."""


class DomainError(ValidationError):
    """Argument outside the domain where the expression is defined."""


class SingularParameterError(ValidationError):
    """A denominator in a closed-form expression vanishes."""


class NonNormalizableError(ValidationError):
    """Wavefunction does not decay, so it cannot be normalized."""


class NormalizationError(ValidationError):
    """Input vector is expected to be normalized but is not."""


class DegenerateProfileError(ValidationError):
    """State has no weight on the doublon diagonal."""


class WindowError(ValidationError):
    """Fit window is empty or contains non-positive samples."""


class AmbiguityError(MosaicDoublonError):
    """Calibration candidates cannot be told apart.

    ``residuals`` maps each candidate to its residual.
    """

    def __init__(self, message, residuals):
        super().__init__(message)
        self.residuals = dict(residuals)


class ResourceError(MosaicDoublonError):
    """Problem size exceeds the dense desk-scale budget."""
