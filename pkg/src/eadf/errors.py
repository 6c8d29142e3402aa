"""Exception types raised by the eadf package."""


class EadfError(Exception):
    """Base class for all package errors."""


class NonDivisibleFactor(EadfError, ValueError):
    """A subsampling factor does not divide the grid half-resolution."""


class ModeMismatch(EadfError, ValueError):
    """An enhanced-mode model is missing phase centers."""


class AllMasked(EadfError, ValueError):
    """The pattern is identically zero, so no direction can be selected."""


class DegenerateInput(EadfError, ValueError):
    """The responses carry no information (all zero)."""


class RankDeficient(EadfError, ValueError):
    """The phase-center design matrix is rank deficient or ill conditioned."""


class UndefinedAtZero(EadfError, ValueError):
    """The relative error is undefined for a zero reference value."""


class BandLimitViolation(EadfError, ValueError):
    """A band-limited element cannot be sampled alias-free on the grid."""


class ContainerError(EadfError, ValueError):
    """A container manifest or data file is malformed."""
