"""Exception types raised by the package."""


class ExceptionalPointError(ValueError):
    """Raised where the diagonalizing transformation is singular (|delta| = 2g)."""

    def __init__(self, what: str = "diagonalization"):
        super().__init__(f"exceptional point: {what} singular")


class ConfigurationError(ValueError):
    """An experiment or integrator setting is out of its allowed range."""


class NumericalFailure(RuntimeError):
    """A numerical procedure did not reach its requested accuracy."""
