"""Exception types shared across the package.

Every error a caller is expected to handle derives from KbqaError; anything
else escaping a module is a bug.
"""

from __future__ import annotations


class KbqaError(Exception):
    """Base class for all errors raised by this package."""


class EmptyInput(KbqaError):
    """Question text is empty, or nothing survives cleaning."""


class FileUnreadable(KbqaError):
    """A data file is missing or cannot be opened."""


class MalformedLine(KbqaError):
    """A data file contains a line that cannot be decoded."""


class ProviderUnavailable(KbqaError):
    """A model provider could not produce a result (unreachable, timeout,
    bad response). Callers are expected to have a deterministic fallback."""


class DimensionMismatch(KbqaError):
    """Vectors of different dimensionality were combined."""


class UnresolvedIntent(KbqaError):
    """No cascade tier produced an intent label.

    ``caused_by_outage`` distinguishes a provider failure (the service maps
    it to 503) from a genuine miss with all tiers healthy (400).
    """

    def __init__(self, message: str, caused_by_outage: bool = False):
        super().__init__(message)
        self.caused_by_outage = caused_by_outage


class InvalidTriple(KbqaError):
    """A triple violates the store's field invariants."""


class ParseError(KbqaError):
    """Query text rejected by the parser, with source position."""

    def __init__(self, line: int, column: int, expected: str, found: str = ""):
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        where = f"line {line}, column {column}"
        detail = f"expected {expected}" + (f", found {found!r}" if found else "")
        super().__init__(f"parse error at {where}: {detail}")


class UnboundVariable(KbqaError):
    """A query references a variable no pattern binds (defensive; query
    validation normally rejects this earlier)."""


class ArityMismatch(KbqaError):
    """Template placeholder count does not match the supplied entities."""

    def __init__(self, expected: int, got: int):
        self.expected = expected
        self.got = got
        super().__init__(f"template expects {expected} entities, got {got}")


class NoTemplateForIntent(KbqaError):
    """Intent resolved but no query template is registered for it.

    The pipeline attaches the recognition result, question vector, and
    cleaned question so the service can seat a clarification session.
    """

    def __init__(self, label: str):
        self.label = label
        self.recognition = None
        self.vector = None
        self.clean_question = None
        self.session_id: str | None = None
        super().__init__(f"no query template registered for intent {label!r}")


class InvalidRequest(KbqaError):
    """A service request is malformed (bad field, over-long question)."""


class WrongState(KbqaError):
    """A dialogue operation was applied in a state that does not allow it."""


class UnknownSession(KbqaError):
    """The referenced dialogue session does not exist or has expired."""


class InvalidLabel(KbqaError):
    """An intent label is empty after slugification."""


class UnknownFormat(KbqaError):
    """An ingest file has an unsupported extension."""


class ConfigError(KbqaError):
    """Service configuration is missing, malformed, or inconsistent."""


class DatasetInvalid(KbqaError):
    """The evaluation dataset fails schema or referential checks."""
