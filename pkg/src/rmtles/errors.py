"""Exception types raised by the library.

Everything derives from :class:`RmtlesError` so the CLI can map data and
validation problems to a single exit code.
"""


class RmtlesError(ValueError):
    """Base class for data/validation errors."""


class FormatError(RmtlesError):
    """Malformed recording file (bad magic, header/body mismatch, ragged CSV)."""


class NonFiniteError(RmtlesError):
    def __init__(self, row, col):
        super().__init__(f"non-finite value at (row={row}, col={col})")
        self.row = row
        self.col = col


class ZeroVarianceChannel(RmtlesError):
    """A channel is constant over a window (dead electrode)."""

    def __init__(self, channel, name=None):
        label = f"{channel}" if name is None else f"{channel} ({name})"
        super().__init__(f"channel {label} has zero variance")
        self.channel = channel


class NotSymmetricError(RmtlesError):
    pass


class NotPSDError(RmtlesError):
    pass


class QuadratureError(RmtlesError):
    """Quadrature did not converge to the requested tolerance."""
