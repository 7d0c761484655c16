"""Exception hierarchy shared by every module."""


class VerdoornError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(VerdoornError, ValueError):
    """Input table is missing columns or is empty."""


class IntegrityError(VerdoornError, ValueError):
    """Duplicate keys or gaps in the panel."""


class DomainError(VerdoornError, ValueError):
    """A value lies outside the domain of an operation."""


class ParameterError(VerdoornError, ValueError):
    """An argument is out of its admissible range."""


class ValidationError(VerdoornError, ValueError):
    """A run configuration is invalid."""


class DegenerateError(VerdoornError, ValueError):
    """Zero variance or an empty weights structure."""


class InsufficientDataError(VerdoornError, ValueError):
    pass


class SingularDesignError(VerdoornError, ValueError):
    pass


class EstimationError(VerdoornError, RuntimeError):
    """Likelihood maximisation failed; ``trace`` holds the evaluations."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


class DiagnosticDegeneracyError(VerdoornError, ArithmeticError):
    """Robust LM denominators are non-positive.

    ``quantities`` holds the raw pieces (d_lambda, d_rho, D, T, ...) and the
    plain LM statistics, which remain valid.
    """

    def __init__(self, message, quantities):
        super().__init__(message)
        self.quantities = dict(quantities)
