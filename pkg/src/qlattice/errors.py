"""Exception types shared across the package."""

from __future__ import annotations


class QLatticeError(ValueError):
    """Base class for domain errors raised by qlattice."""


class UnstableStepError(QLatticeError):
    """Raised when an explicit time step produced a non-finite state.

    Carries the squared norm observed before renormalization so callers
    can report how badly the step blew up.
    """

    def __init__(self, pre_norm: float):
        super().__init__(f"unstable step (pre-normalization squared norm {pre_norm!r})")
        self.pre_norm = pre_norm


class SnapshotError(QLatticeError):
    """Raised on malformed snapshot streams. `code` distinguishes the failure."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
