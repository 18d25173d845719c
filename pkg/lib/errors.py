from .constants import ExitCode


class TriorthoError(ValueError):
    """Domain error: the inputs describe something the construction does not admit."""

    exit_code = ExitCode.DOMAIN_ERROR


class BudgetExceededError(TriorthoError):
    exit_code = ExitCode.BUDGET


class AboveThresholdError(TriorthoError):
    """Raised when an input noise level does not distill towards the magic state."""


class InvariantViolationError(TriorthoError):
    exit_code = ExitCode.INVARIANT


class CodespaceNotPreservedError(InvariantViolationError):
    """Transversal T moved a codeword out of the codespace."""
