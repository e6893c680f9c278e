"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A caller-supplied parameter is outside the supported domain."""


class UnsupportedError(ValueError):
    """The requested operation is not defined for the given model."""


class InternalInconsistencyError(RuntimeError):
    """A self-check failed: a computed result violates a structural guarantee."""
