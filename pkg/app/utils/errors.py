# app/utils/errors.py


class ConfigError(ValueError):
    """Invalid input: scene files, parameters outside their admissible range."""


class NumericalFailure(RuntimeError):
    """A solver or quadrature could not deliver the requested accuracy."""


class DomainError(ValueError):
    pass


class BudgetExceeded(NumericalFailure):
    pass


class QuadratureFailure(NumericalFailure):
    pass


class NotContractive(NumericalFailure):
    pass


class NoneFound(NumericalFailure):
    pass


class InadmissiblePerturbation(ConfigError):
    pass


class ResolutionTooCoarse(ConfigError):
    pass


class PrecondViolated(ConfigError):
    pass


class InvalidScene(ConfigError):
    pass


class SuiteAssertionError(AssertionError):
    """A suite found a row contradicting the theorem it encodes."""

    def __init__(self, message, rows=None):
        super().__init__(message)
        self.rows = rows or []
