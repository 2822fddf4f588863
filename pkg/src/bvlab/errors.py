"""Error taxonomy shared across the workbench.

The CLI maps these onto exit codes: clean run 0, inequality violation 1,
usage/domain problems 2, resource limits 3.
"""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


class CapacityError(RuntimeError):
    """A request exceeds a configured resource cap (memory, table range)."""


class ConsistencyError(AssertionError):
    """Two independent computations of the same quantity disagree.

    Raised by dual-path checks (character-sum decompositions) where a
    mismatch indicates an implementation bug, not a bad input.
    """
