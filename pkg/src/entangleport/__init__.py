"""Distributed execution of collective qubit operations over shared Bell pairs."""

from .errors import (
    EntangleportError,
    InputError,
    LocalityViolation,
    MeasurementError,
    ProtocolError,
    ResourceExhausted,
    UnsupportedError,
)
from .statevec import StateVector
from .resgraph import BoundReport, CutSpec, ResourceMatrix
from .netmodel import Network, build_network
from .teleproto import ProtocolReport, TeleportRecord, hub_execute, teleport_qubit

__all__ = [
    "BoundReport",
    "CutSpec",
    "EntangleportError",
    "InputError",
    "LocalityViolation",
    "MeasurementError",
    "Network",
    "ProtocolError",
    "ProtocolReport",
    "ResourceExhausted",
    "ResourceMatrix",
    "StateVector",
    "TeleportRecord",
    "UnsupportedError",
    "build_network",
    "hub_execute",
    "teleport_qubit",
]

__version__ = "0.1.0"
