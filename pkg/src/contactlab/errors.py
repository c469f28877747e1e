"""Shared exception types.

Every user-facing error carries a message plus optional structured fields
(`location`, `rule`) so the CLI and the HTTP service can emit the same
error JSON.
"""

from __future__ import annotations


class ContactLabError(Exception):
    """Base class for all library errors."""

    def __init__(self, message: str, location=None, rule: str | None = None):
        super().__init__(message)
        self.message = message
        self.location = location
        self.rule = rule

    def to_json(self) -> dict:
        out = {"error": self.message}
        if self.location is not None:
            out["location"] = self.location
        if self.rule is not None:
            out["rule"] = self.rule
        return out


class ParseError(ContactLabError):
    """Syntax or semantic error in expression / one-form / front text."""


class DegreeError(ContactLabError):
    """Illegal form degree for an exterior-calculus operation."""


class DomainError(ContactLabError):
    """Evaluation outside the declared domain, or an invalid domain."""


class FrontError(ContactLabError):
    """Invalid front word or illegal front operation."""


class MoveError(FrontError):
    """A diagram move whose pattern precondition fails at the given position."""


class SurfaceError(ContactLabError):
    """Invalid surface chart (non-immersed, inconsistent periodicity, ...)."""


class NumericalError(ContactLabError):
    """An internal numerical procedure failed to converge or stay finite."""
