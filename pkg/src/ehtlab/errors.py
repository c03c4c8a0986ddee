"""Error types shared across the package."""


class InvariantError(ValueError):
    """A declared invariant of a constructed object failed at evaluation time."""


class DomainError(ValueError):
    """An evaluation point lies outside the supported domain."""


class BudgetExceededError(RuntimeError):
    """A certified-tolerance computation ran out of its term budget."""


class HorizonExceededError(RuntimeError):
    """A majorant never dropped below the requested threshold within its horizon."""
