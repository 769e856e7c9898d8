"""Exception hierarchy shared across the package."""


class SelinfError(Exception):
    """Base class for all package errors."""


class UsageError(SelinfError):
    """Malformed arguments or data that violate a documented precondition."""


class CapacityError(SelinfError):
    """A requested construction exceeds a configured size cap."""


class SolverError(SelinfError):
    """The feasibility solver failed to converge (distinct from infeasible)."""


class InapplicableError(SelinfError):
    """A test's preconditions are not met; the test yields no verdict."""
