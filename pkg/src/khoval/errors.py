"""Exception hierarchy for the engine.

Every error raised on purpose derives from :class:`KhovalError`, so callers
(and the CLI) can map failure classes to exit codes without string matching.
"""


class KhovalError(Exception):
    """Base class for all engine errors."""


class ParseError(KhovalError):
    """Malformed PD text, movie JSON, or inconsistent arc incidences."""


class OrientationError(ParseError):
    """No consistent orientation assignment exists for a PD code."""


class MoveError(KhovalError):
    """An elementary string interaction does not match its local pattern."""


class UnsupportedMoveError(MoveError):
    """A move variant the engine deliberately does not implement."""


class ValidationError(KhovalError):
    """A movie failed validation; carries the failing event index."""

    def __init__(self, index: int, reason: str):
        super().__init__(f"event {index}: {reason}")
        self.index = index
        self.reason = reason


class CapExceededError(KhovalError):
    """A size limit (crossing cap) was exceeded."""


class TheoryError(KhovalError):
    """Operation not defined for the requested coefficient theory."""


class NonMonomialError(KhovalError):
    """Internal consistency failure: a closed-movie value was not a monomial."""
