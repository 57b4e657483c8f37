"""Exception types shared across the package."""


class FnegError(Exception):
    """Base class for all package-specific errors."""


class LayoutError(FnegError, ValueError):
    """Invalid mode layout or subsystem specification."""


class ParityError(FnegError, ValueError):
    """Operation applied to an operator outside the physical (parity-even) algebra."""


class StateValidationError(FnegError, ValueError):
    """Input fails density-matrix or pure-state validation."""


class ClassificationError(FnegError, RuntimeError):
    """Internal disagreement between two independent classification tests."""


class SamplingError(FnegError, RuntimeError):
    """A constrained random sampler exhausted its resampling budget."""
