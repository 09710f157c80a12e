"""Shared exception types."""


class SwarmMeshError(Exception):
    """Base class for all package errors."""


class ShapeError(SwarmMeshError):
    """Vector/matrix dimensions do not chain or do not match."""


class WeightFormatError(SwarmMeshError):
    """Weight file is malformed; carries a byte offset when known."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class ValidationError(SwarmMeshError):
    """A configuration or plan violates its invariants."""


class TransportError(SwarmMeshError):
    """Transport backend failure (closed endpoint, socket error, ...)."""
