"""Exception types shared across the package.

The CLI maps :class:`ParameterError` and :class:`DimensionError` to exit
code 1 and the budget-style failures (:class:`SizeError`,
:class:`ResolutionError`, :class:`AccuracyError`) to exit code 2.
"""


class MfreqError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ParameterError(MfreqError, ValueError):
    pass


class DimensionError(MfreqError, ValueError):
    pass


class SizeError(MfreqError):
    exit_code = 2


class ResolutionError(MfreqError):
    exit_code = 2


class AccuracyError(MfreqError):
    exit_code = 2


class InvariantViolation(MfreqError):
    exit_code = 2
