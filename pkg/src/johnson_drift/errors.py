"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested quantity."""


class UnsupportedInstanceError(DomainError):
    """The instance is valid as a graph but excluded from chain analysis.

    J(2, 1) is a single edge: its distance process alternates
    deterministically between 0 and 1 and is left out of the chain machinery.
    """


class ResourceError(RuntimeError):
    """An enumeration or exact solve would exceed its configured cap."""
