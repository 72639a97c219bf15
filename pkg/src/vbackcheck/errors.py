"""Shared exception hierarchy."""


class VBackCheckError(Exception):
    """Base class for all package errors."""


class ShapeError(VBackCheckError):
    """Mask or matrix dimensions do not match."""


class FormatError(VBackCheckError):
    """A serialized value violates its schema or invariants."""


class ValidationError(VBackCheckError):
    """A domain value violates a type invariant."""


class ConfigurationError(VBackCheckError):
    """Missing or inconsistent configuration (strict stub miss, bad paths)."""


class TransportError(VBackCheckError):
    """A remote backend could not be reached, after retries."""


class ProtocolError(VBackCheckError):
    """A remote backend answered with an unparseable or invalid payload."""

    def __init__(self, message: str, raw: str = ""):
        super().__init__(message)
        self.raw = raw


class StageError(VBackCheckError):
    """A pipeline stage failed for an entire work item."""


class ContractError(VBackCheckError):
    """Caller violated an operation precondition."""
