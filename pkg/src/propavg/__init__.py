"""PROPavg allocations of indivisible goods, with exact fairness verification."""

from .errors import BudgetError, InputError, InternalError, InvariantViolation, PropavgError
from .fairness import (
    ALL_NOTIONS,
    Certificate,
    Notion,
    SatisfactionReport,
    certificate,
    deficiency_numerator,
    is_satisfied,
    verify,
    verify_many,
)
from .instance import (
    Allocation,
    Instance,
    bundle_value,
    min_good_value,
    total_value,
    validate_allocation,
)
from .solver import SolverTrace, solve, solve_traced

__all__ = [
    "ALL_NOTIONS",
    "Allocation",
    "BudgetError",
    "Certificate",
    "InputError",
    "Instance",
    "InternalError",
    "InvariantViolation",
    "Notion",
    "PropavgError",
    "SatisfactionReport",
    "SolverTrace",
    "bundle_value",
    "certificate",
    "deficiency_numerator",
    "is_satisfied",
    "min_good_value",
    "solve",
    "solve_traced",
    "total_value",
    "validate_allocation",
    "verify",
    "verify_many",
]
