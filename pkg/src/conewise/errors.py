"""Exception types shared across the package."""


class ConewiseError(Exception):
    """Base class for all package errors."""


class InvalidSpecError(ConewiseError, ValueError):
    """A spectral model, ensemble recipe, or run configuration is malformed."""


class NumericalError(ConewiseError, RuntimeError):
    """A numerical routine failed to reach its accuracy target."""


class DegenerateProcessError(NumericalError):
    """A stochastic process has vanishing variance where positive variance is required."""


class DegenerateDynamicsError(NumericalError):
    """The evolving direction was annihilated by a matrix application."""

    def __init__(self, step: int):
        super().__init__(f"direction mapped to the zero vector at step {step}")
        self.step = step


class FitError(ConewiseError, ValueError):
    """A regression could not be performed on the supplied data."""


class CollapseUndefinedError(ConewiseError, ValueError):
    """Finite-size curves do not overlap enough to define a collapse metric."""
