"""Exception hierarchy.

Data problems (bad input, impossible parameter combinations) derive from
``DataError``; numerical breakdowns (divergent integration, degenerate
samples) derive from ``NumericalError``. The CLI maps the two families to
distinct exit codes.
"""


class SpiError(Exception):
    """Base class for all package errors."""


class DataError(SpiError, ValueError):
    pass


class NumericalError(SpiError, ArithmeticError):
    pass


class SeriesTooShortError(DataError):
    pass


class InvalidSplitError(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class TooFewSamplesError(DataError):
    pass


class NoValidNeighborsError(DataError):
    pass


class NonFiniteStateError(NumericalError):
    def __init__(self, step):
        super().__init__(f"state became non-finite at step {step}")
        self.step = step


class DegenerateDataError(NumericalError):
    pass


class ZeroDenominatorError(NumericalError):
    pass
