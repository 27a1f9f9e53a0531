"""Exception hierarchy shared by every module."""


class OddIndexError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(OddIndexError, ValueError):
    pass


class PreconditionError(OddIndexError, ValueError):
    pass


class NonEquivariantOperatorError(OddIndexError):
    """An operator fails to commute with the group action."""


class LevelSelectionError(OddIndexError):
    """No admissible spectral level separates the endpoint spectra."""


class InsufficientResolutionError(OddIndexError):
    """Sampling is too coarse to certify the flow and no refiner is available."""


class NonConvergenceError(OddIndexError):
    pass


class IllConditionedKernelError(OddIndexError):
    """Singular values do not separate cleanly into zero and nonzero parts."""


class TruncationTooSmallError(OddIndexError):
    pass


class ResolutionError(OddIndexError):
    pass


class EquivarianceViolationError(OddIndexError):
    pass


class SingularAngleError(OddIndexError, ValueError):
    pass


class ConfigurationError(OddIndexError):
    pass
