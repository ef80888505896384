"""Exception types shared across the library.

Every error carries a short machine-readable ``code`` so the CLI can map
failures onto stable exit codes and one-line diagnostics.
"""

from __future__ import annotations


class TempStableError(Exception):
    """Base class for all library errors."""

    code = "ERROR"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class DomainError(TempStableError):
    """Invalid parameters or arguments outside an operation's domain."""

    code = "PARAM_DOMAIN"


class InfeasibleCumulantsError(DomainError):
    """Sample cumulants incompatible with any law in the family."""

    code = "INFEASIBLE_CUMULANTS"


class ConvergenceError(TempStableError):
    """A numerical routine failed to reach its target accuracy."""

    code = "NO_CONVERGENCE"


class NoMartingaleMeasureError(TempStableError):
    """No equivalent martingale measure exists for the given market."""

    code = "NO_MEASURE"
