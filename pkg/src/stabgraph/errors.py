"""Exception types shared across the package."""


class StabgraphError(Exception):
    """Base class for all package errors."""


class InvalidArgument(StabgraphError, ValueError):
    pass


class InvariantViolation(StabgraphError):
    """A tableau or structure failed one of its defining invariants."""


class ResourceLimit(StabgraphError):
    """A computation would exceed a configured size cap."""


class ConsistencyError(StabgraphError):
    """An internal cross-check failed (count mismatch, non-divisibility, ...)."""


class CacheFormatError(StabgraphError):
    pass


class CorruptCacheError(StabgraphError):
    pass


class InvalidTraversal(StabgraphError):
    """A replayed circuit left its component or used a gate outside the gate set."""
