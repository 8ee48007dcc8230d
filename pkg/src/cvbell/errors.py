"""Domain exceptions shared across the package."""


class CvbellError(Exception):
    """Base class for domain-level failures (as opposed to bad arguments)."""


class DegenerateSourceError(CvbellError):
    """All four coincidence rates vanish, so normalized probabilities are 0/0."""


class DegenerateEstimateError(CvbellError):
    """A sampled coincidence denominator is not resolvably positive."""


class InsufficientDataError(CvbellError):
    """An estimator cell holds too few windows to form a mean and error bar."""
