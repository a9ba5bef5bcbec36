"""Exception types shared across the package."""


class GlmEpError(Exception):
    """Base class for all errors raised by this package."""


class NonIntegrable(GlmEpError):
    """A Gaussian form has no finite integral (non-positive precision)."""


class DegenerateVariance(GlmEpError):
    """A moment-form Gaussian with zero variance has no natural-parameter form."""


class SingularMatrix(GlmEpError):
    """A required matrix solve or inverse failed."""


class NotPD(GlmEpError):
    """A matrix that must be symmetric positive definite is not."""


class ThresholdViolation(GlmEpError):
    """A rank-one precision update would destroy positive definiteness."""


class InfeasibleThreshold(GlmEpError):
    """No integrable product is compatible with the requested precision bound."""


class NonIntegrableBelief(GlmEpError):
    """A factor belief is non-integrable; EPC treats this as the skip signal."""


class ValidationError(GlmEpError):
    """An internal invariant check failed (enabled with ``validate=True``)."""


class ZeroSignal(GlmEpError):
    """NMSE is undefined for an all-zero reference signal."""
