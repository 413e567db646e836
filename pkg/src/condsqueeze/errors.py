"""Exception hierarchy shared by the simulator modules."""


class CondSqueezeError(Exception):
    """Base class for every error raised by this package."""


class LayoutError(CondSqueezeError, ValueError):
    """Operator/state layouts are inconsistent, or a factor has the wrong kind."""


class TruncationError(CondSqueezeError, ValueError):
    """An amplitude is too large for the Fock-space truncation."""


class NumericalError(CondSqueezeError, ArithmeticError):
    """Non-finite input, non-Hermitian assembly, or similar numerical failure."""


class GuardAbort(CondSqueezeError, RuntimeError):
    """A runtime guard stopped an evolution.

    The partially completed record, if any, is kept on ``record`` so that
    callers can still inspect what happened before the abort.
    """

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record


class LeakageAbort(GuardAbort):
    """Population in the top Fock levels exceeded the abort threshold."""


class NormDriftAbort(GuardAbort):
    """The integrator lost norm beyond the allowed drift."""


class PostSelectionError(CondSqueezeError, ValueError):
    """The requested measurement outcome has vanishing probability."""


class ConfigError(CondSqueezeError, ValueError):
    """A scenario configuration is malformed or violates a guard."""
