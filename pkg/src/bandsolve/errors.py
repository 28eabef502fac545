"""Exception hierarchy shared by the solver modules."""

from __future__ import annotations


class BandsolveError(Exception):
    """Base class for all errors raised by bandsolve."""


class DomainError(BandsolveError, ValueError):
    """Input lies outside the domain where an operation is defined."""


class PreconditionError(BandsolveError, ValueError):
    """A documented precondition of an operation does not hold."""


class RegimeError(PreconditionError):
    """Parameters fall outside the regime where an estimate applies."""


class IntegratorError(BandsolveError, RuntimeError):
    """The ODE integrator failed (step-size underflow or non-finite state)."""


class NoBracketError(BandsolveError, RuntimeError):
    """No sign change of the shooting residual was found.

    ``trace`` holds the scanned ``(u0, residual, admissible)`` triples.
    """

    def __init__(self, message: str, trace: list[tuple[float, float, bool]] | None = None):
        super().__init__(message)
        self.trace = list(trace or [])
