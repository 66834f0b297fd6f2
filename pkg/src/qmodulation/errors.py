"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class RepresentationError(ValueError):
    """State cannot be expressed in the requested representation."""


class CapacityError(RuntimeError):
    """Computation would exceed a configured resource cap."""

    def __init__(self, message: str, dimension: int | None = None):
        super().__init__(message)
        self.dimension = dimension


class IdealModulatorError(DomainError):
    """Modulated letter states are not pairwise orthogonal."""


class ConsistencyError(RuntimeError):
    """Internal cross-check failed; indicates a bug rather than a math result."""
