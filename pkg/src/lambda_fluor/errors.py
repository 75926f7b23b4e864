"""Exception hierarchy shared by all modules."""


class LambdaFluorError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(LambdaFluorError, ValueError):
    """A physical parameter or configuration value is out of range."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class RegimeError(LambdaFluorError, ValueError):
    """A closed-form expression was requested outside its regime of validity."""


class PreconditionError(LambdaFluorError, ValueError):
    """An operation was called with inputs violating its stated precondition."""


class NumericalError(LambdaFluorError, RuntimeError):
    """A numerical procedure failed; ``diagnostics`` holds what is known."""

    def __init__(self, message: str, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class NoFluorescenceError(NumericalError):
    """The excited-state population is too small to normalize a spectrum."""


class NoPeakError(LambdaFluorError, ValueError):
    """No isolated narrow peak could be located at the laser frequency."""
