"""Error types shared by the computational modules."""

from __future__ import annotations


class DomainError(ValueError):
    """Raised when a parameter lies outside its admissible range."""


class DominationError(DomainError):
    """Raised when entrywise domination fails in a comparison check.

    Attributes:
        index: First sequence index where the domination is violated.
    """

    def __init__(self, message: str, index: int) -> None:
        super().__init__(message)
        self.index = index


class ConvergenceError(RuntimeError):
    """Raised when an iterative computation does not reach its tolerance.

    Attributes:
        diagnostics: Values describing the state at the point of failure.
    """

    def __init__(self, message: str, diagnostics: dict[str, object]) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics
