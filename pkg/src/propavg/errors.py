"""Exception hierarchy.

Input errors are the caller's fault. Internal errors mark branches that the
correctness proofs say cannot be reached; seeing one means a bug here.
"""


class PropavgError(Exception):
    pass


class InputError(PropavgError, ValueError):
    """Malformed instance, allocation, or argument."""


class BudgetError(PropavgError):
    """Exhaustive enumeration would exceed the configured budget."""


class InternalError(PropavgError, RuntimeError):
    """A proof-guaranteed condition failed."""


class InvariantViolation(InternalError):
    """A solver loop invariant failed while running with checks enabled."""
