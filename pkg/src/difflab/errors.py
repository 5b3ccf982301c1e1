"""Exception types shared across the lab."""


class DomainError(ValueError):
    """An argument lies outside the mathematically admissible range."""


class CoverageError(DomainError):
    """A target grid does not cover the mapped support of a field."""


class ConfigError(ValueError):
    """An experiment configuration file is malformed or inconsistent."""


class NumericalFailureError(RuntimeError):
    """An iterative procedure failed to converge or produced non-finite values."""


class InstabilityError(NumericalFailureError):
    """A time step produced an inadmissible field value."""

    def __init__(self, message: str, cell: int | None = None, time: float | None = None):
        super().__init__(message)
        self.cell = cell
        self.time = time
