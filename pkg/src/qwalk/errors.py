"""Exception hierarchy shared across the toolkit.

Everything user-facing derives from :class:`QwalkError` so the CLI can map
domain failures to a single exit code.
"""


class QwalkError(Exception):
    """Base class for all errors raised by this package."""


class GraphError(QwalkError):
    """Invalid graph parameters, malformed edge-list input, or a graph that
    violates a structural precondition (disconnected, self-loop, ...)."""


class SpectrumError(QwalkError):
    """Eigendecomposition failure or integer-spectrum validation failure."""


class DepthError(QwalkError):
    """Inconsistent depth-chain data, e.g. a vanishing level overlap."""


class ScheduleError(QwalkError):
    """Schedule synthesis failure (overlap out of range, bad stage data)."""


class SimulationError(QwalkError):
    """State-vector execution failure (dimension mismatch, missing marked
    vertex, entangled ancilla at a detach point)."""
