"""Exception types shared across the package."""


class TenformatError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(TenformatError, ValueError):
    """An argument violates an operation's contract."""


class SamplingFailureError(TenformatError, RuntimeError):
    """Random sampling kept producing degenerate choices."""

    def __init__(self, message: str, vertex: int | None = None):
        super().__init__(message)
        self.vertex = vertex


class ConstructionFailureError(TenformatError, RuntimeError):
    """A constructive witness failed its exact certification."""

    def __init__(self, message: str, trace: tuple = ()):
        super().__init__(message)
        self.trace = tuple(trace)


class InternalInconsistencyError(TenformatError, RuntimeError):
    """Derived data violates an invariant; usually signals numerical breakdown."""
