"""Shared error types with machine-readable categories (mirrored by CLI
exit codes)."""

from __future__ import annotations


class PreconditionError(ValueError):
    """An operation's input contract was violated; names the condition."""

    def __init__(self, condition: str, message: str | None = None) -> None:
        self.condition = condition
        super().__init__(message or f"precondition violated: {condition}")


class CapacityError(RuntimeError):
    """Free parameters / search budget exhausted; reports what blocked."""

    def __init__(self, message: str, blocking=None) -> None:
        self.blocking = blocking
        super().__init__(message)


class VerificationError(RuntimeError):
    """A constructed object failed its own re-verification."""
