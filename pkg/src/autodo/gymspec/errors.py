"""Errors raised by gym specification parsing, validation, and evaluation."""

from __future__ import annotations


class GymSpecError(Exception):
    """Base class for all gym specification errors."""


class ParseError(GymSpecError):
    """Malformed document or expression text.

    Carries the character position of the offending token when known.
    """

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class SchemaError(GymSpecError):
    """Structurally invalid document: missing/extra field, bad type, unresolved name."""


class ExpressionTypeError(GymSpecError):
    """Expression does not type-check to a real or boolean value."""


class InvalidSpec(GymSpecError):
    """Operation requires a spec whose validation report is clean."""


class UnknownAction(GymSpecError):
    """Action label is not in the spec's expanded action set."""


class EpisodeFinished(GymSpecError):
    """step() called on a state already marked done."""


class DivisionByZero(GymSpecError):
    """Expression evaluation divided by zero; the episode is marked failed."""


class UnknownBackend(GymSpecError):
    """Requested code-generation backend is not registered."""
