"""Exception hierarchy.

Each error carries the CLI exit code it maps to, so the command-line front
end never needs a lookup table.
"""


class DelayQPError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ProblemFormatError(DelayQPError, ValueError):
    """A problem or parameter file could not be parsed."""

    exit_code = 1


class ProblemValidationError(DelayQPError, ValueError):
    """Parsed data violates a structural or convexity requirement."""

    exit_code = 2

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class RankDeficientError(ProblemValidationError):
    """The equality constraint matrix does not have full row rank."""


class InfeasibleError(ProblemValidationError):
    """No KKT point exists (infeasible or unbounded problem)."""


class DivergenceError(DelayQPError, ArithmeticError):
    """The integrated state became non-finite."""

    exit_code = 3

    def __init__(self, message, time):
        super().__init__(message)
        self.time = time


class NotConvergedError(DelayQPError):
    exit_code = 4


class ConfigError(DelayQPError, ValueError):
    """Invalid integration or network configuration."""

    exit_code = 2


class UndefinedDecayError(DelayQPError, ValueError):
    """Decay rate requested for a trajectory that never leaves equilibrium."""
