"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """Input outside an operation's preconditions."""


class UnsupportedDomain(ValueError):
    """The requested quantity is not defined, or not implemented, on this domain."""
