"""
Shared exception hierarchy for the triple-entry audit toolkit.

Errors raised by a single module live next to the code that raises them;
the ones below are raised by several modules.
"""


class TripleEntryError(Exception):
    """Base class for every domain error raised by this package."""

    pass


class ConfigError(TripleEntryError):
    """Raised when a run parameter is missing or outside its accepted range."""

    pass


class EmptyInput(TripleEntryError):
    """Raised when an operation needs at least one record or row."""

    pass


class SingleClass(TripleEntryError):
    """Raised when a supervised operation sees fewer than two classes."""

    pass


class KOutOfRange(TripleEntryError):
    """Raised when a neighbour or cluster count does not fit the data."""

    pass


class TooFewParties(TripleEntryError):
    """Raised when a multi-party protocol is started with fewer than two parties."""

    pass


class LengthMismatch(TripleEntryError):
    """Raised when paired vectors differ in length."""

    pass
