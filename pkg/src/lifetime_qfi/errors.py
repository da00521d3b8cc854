"""Exception types raised by the numerical pipeline."""


class NumericsError(RuntimeError):
    """Base class for numerical failures that should abort a computation."""


class ConvergenceError(NumericsError):
    """Frequency quadrature did not settle under node doubling."""


class TruncationError(NumericsError):
    """Trace deficit of the truncated WL-basis state is too large for ``n_max``."""


class NegativityError(NumericsError):
    """A density matrix has an eigenvalue below the negativity tolerance."""


class StepError(NumericsError):
    """Central-difference derivative is sensitive to the step size."""


class ExtentError(NumericsError):
    """Time grid is too short to hold the decay tail."""
