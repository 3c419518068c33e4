"""Error taxonomy shared by all modules.

Three failure classes, kept deliberately small:

* DomainError       -- an operation received input outside its contract
                       (non-admissible chain, missing vertex, bad step target).
* StructureError    -- a composite object (fiber, model, boundary) violates a
                       structural hypothesis (kernel law broken, boundary
                       disconnected, separator not unique, ...).
* InconsistencyError-- two routes that must agree disagreed; signals a bug or
                       a hand-built object outside the theory, never a user
                       input problem.
"""

from __future__ import annotations


class QhpError(Exception):
    """Base class for structured errors raised by this package."""

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = dict(details)


class DomainError(QhpError):
    pass


class StructureError(QhpError):
    pass


class InconsistencyError(QhpError):
    pass


class FormatError(QhpError):
    """Serialized input does not parse into the expected wire format."""


class NormalizationError(StructureError):
    """Boundary cannot be brought to standard form by inner moves."""
