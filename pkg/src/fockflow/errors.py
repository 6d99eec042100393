"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: ``HypothesisViolation`` -> 2,
``NumericalFailure`` -> 3.
"""


class FockflowError(Exception):
    """Base class for all library errors."""


class HypothesisViolation(FockflowError):
    """The input lies outside the regime where a criterion applies."""


class NumericalFailure(FockflowError):
    """A numerical kernel could not produce a trustworthy answer."""


class InputError(FockflowError, ValueError):
    """Malformed or dimensionally inconsistent input."""
