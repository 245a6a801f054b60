"""
efcap Errors
Exception hierarchy shared by the numerical modules and the CLI
"""

from typing import Any, Optional


class EFCapError(Exception):
    """Base class for all efcap failures"""


class InvalidParamsError(EFCapError, ValueError):
    """A precondition on (N, p), Γ, λ, Θ or a config value does not hold"""


class ConfigError(EFCapError, ValueError):
    """Configuration file unreadable or inconsistent"""


class OutOfRangeError(EFCapError, ValueError):
    """Target value lies outside the range attained by the branch"""


class IntegrationError(EFCapError, RuntimeError):
    """Numerical failure of an ODE integration or a root bracket

    ``partial`` holds whatever was computed before the failure (a profile,
    a list of branch points), so callers can still write it out.
    """

    def __init__(self, message: str, partial: Optional[Any] = None):
        super().__init__(message)
        self.partial = partial


class ConvergenceError(IntegrationError):
    """Refinement did not settle (Θ* halving, bracket expansion)"""


EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_NUMERICAL_FAILURE = 3
EXIT_ACCEPTANCE_FAILURE = 4


def exit_code_for(error: BaseException) -> int:
    """Map an exception onto the CLI exit-code contract"""
    if isinstance(error, IntegrationError):
        return EXIT_NUMERICAL_FAILURE
    if isinstance(error, (InvalidParamsError, ConfigError, OutOfRangeError)):
        return EXIT_INVALID_INPUT
    return EXIT_NUMERICAL_FAILURE
