"""Exception hierarchy.

Errors fall in two families that the command line maps to distinct exit codes:
physically impossible inputs (no perfect-transfer window) and numerical
breakdowns (convergence, interlacing, Lanczos).
"""


class SpinChainError(Exception):
    """Base class for every error raised by this package."""


class InvalidSizeError(SpinChainError, ValueError):
    pass


class InvalidChainError(SpinChainError, ValueError):
    pass


class DegenerateSpectrumError(SpinChainError, ValueError):
    pass


class IndexOutOfRangeError(SpinChainError, IndexError):
    pass


class SizeLimitError(SpinChainError, ValueError):
    pass


class NotNormalizedError(SpinChainError, ValueError):
    pass


class NoTransferWindowError(SpinChainError, ValueError):
    """The spectrum admits no time at which the end-to-end transfer is perfect."""


class IncommensurateSpectrumError(NoTransferWindowError):
    """Gap ratios are not rational within tolerance."""


class NotAtTransferError(SpinChainError, ValueError):
    """The amplitude at the requested time is not of unit magnitude."""


class NumericalError(SpinChainError, ArithmeticError):
    """Base class for numerical failures of otherwise valid inputs."""


class ConvergenceError(NumericalError):
    pass


class LanczosBreakdownError(NumericalError):
    pass


class InterlacingError(NumericalError):
    pass


class ParityError(SpinChainError, ValueError):
    """Operation defined only for chains of the other length parity."""
