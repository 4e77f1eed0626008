"""Exception hierarchy shared by every layer of the library."""


class PsiError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameters(PsiError):
    """A construction parameter is outside its documented range."""


class InvalidPoint(PsiError):
    """A byte string does not encode a valid, non-identity curve point."""


class MalformedMessage(PsiError):
    """A wire message failed to decode (bad framing, lengths, or contents)."""


class TooManyElements(PsiError):
    """A request exceeds the query allowance the server was provisioned for."""


class RevealModeMismatch(PsiError):
    """The request's reveal flag conflicts with the server's pinned mode."""


class CountMismatch(PsiError):
    """A response does not carry one element per requested element."""


class StateAlreadyUsed(PsiError):
    """A single-use client state was presented a second response."""


class RateLimited(PsiError):
    """The server refused the request; the setup key must be rotated."""
