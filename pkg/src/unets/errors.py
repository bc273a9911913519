"""Exception hierarchy shared by every module.

The CLI maps each family onto an exit status, so new errors should derive
from one of the four category classes below.
"""

from __future__ import annotations

from typing import Optional


class UnetsError(Exception):
    """Base class for all library errors."""


class ParseError(UnetsError):
    """Syntax error at a known position of the input text."""

    def __init__(self, message: str, text: str = "", pos: Optional[int] = None):
        self.message = message
        self.pos = pos
        if pos is not None:
            self.line = text.count("\n", 0, pos) + 1
            self.column = pos - (text.rfind("\n", 0, pos) + 1) + 1
            message = "line %d, column %d: %s" % (self.line, self.column, message)
        else:
            self.line = self.column = None
        super().__init__(message)


class ArityError(ParseError):
    """A predicate or function symbol used with two different arities."""


class IllFormedError(UnetsError):
    """Input parses but is not a well-formed object (bad cut, bad proof, ...)."""


class MalformedCutError(IllFormedError):
    """The two sides of a cut are not dual."""


class ResourceLimit(UnetsError):
    """A configured size cap would be exceeded."""

    def __init__(self, message: str, needed: Optional[int] = None, cap: Optional[int] = None):
        self.needed = needed
        self.cap = cap
        super().__init__(message)
