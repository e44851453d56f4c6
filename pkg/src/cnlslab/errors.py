"""Exception types shared across the package."""

from __future__ import annotations


class CnlsError(Exception):
    """Base class for all package-specific failures."""


class ConfigError(CnlsError):
    """A run configuration is malformed or inconsistent."""


class BoxTooSmallError(CnlsError):
    """The periodic box cannot contain the requested fields.

    Raised when a profile or soliton tail at the box boundary (or at the
    periodic seam between two solitons) exceeds the truncation tolerance.
    """


class SolverError(CnlsError):
    """An iterative solver failed to converge or collapsed."""


class BlowUpError(CnlsError):
    """A non-finite field was detected during time integration."""

    def __init__(self, t: float, message: str | None = None):
        self.t = t
        super().__init__(message or f"non-finite field detected at t={t}")
