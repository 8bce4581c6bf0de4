"""Exception types shared across modules.

``InvariantViolation`` signals a falsified theorem or broken internal
invariant: valid input can only trigger it if the implementation is wrong.
"""


class InvariantViolation(AssertionError):
    exit_code = 3


class BudgetExhausted(RuntimeError):
    exit_code = 2


class DegenerateSetError(ValueError):
    """Empty or full vertex set passed where a proper subset is required."""

    code = "degenerate"


class EmptySetError(DegenerateSetError):
    code = "empty-set"


class FullSetError(DegenerateSetError):
    code = "full-set"
