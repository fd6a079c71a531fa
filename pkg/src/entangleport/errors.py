"""Exception hierarchy shared by every module."""


class EntangleportError(Exception):
    """Base class for all package errors."""


class InputError(EntangleportError, ValueError):
    """Malformed arguments: wrong dimensions, bad matrices, bad indices."""


class MeasurementError(EntangleportError):
    """A branch was requested whose probability is (numerically) zero."""


class ProtocolError(EntangleportError):
    """Internal protocol bug, e.g. discarding a qubit that is still correlated."""


class ResourceExhausted(ProtocolError):
    """No Bell pair left on the requested edge."""


class LocalityViolation(ProtocolError):
    """A gate or measurement touched qubits owned by more than one lab."""


class UnsupportedError(EntangleportError):
    """Request outside what is implemented (odd-N bounds, for instance)."""
