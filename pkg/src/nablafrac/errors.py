"""Exception hierarchy shared by every module."""

from __future__ import annotations


class NablaError(ValueError):
    """Base class for all library errors."""


class PointNotInScale(NablaError):
    def __init__(self, t: float):
        super().__init__(f"point {t!r} is not a point of the time scale")
        self.t = t


class OutsideKappaDomain(NablaError):
    def __init__(self, t: float):
        super().__init__(f"point {t!r} is the scale minimum and lies outside T^kappa")
        self.t = t


class DegenerateScale(NablaError):
    pass


class ReversedBounds(NablaError):
    pass


class ScaleMismatch(NablaError):
    pass


class OrderOutOfRange(NablaError):
    pass


class NonUniformScale(NablaError):
    pass


class PoleOnScale(NablaError):
    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


class MaskedInput(NablaError):
    pass


class ParseError(NablaError):
    """Raised on malformed expression text.

    ``offset`` is a byte offset into the UTF-8 encoding of the source and
    ``expected`` the set of token descriptions acceptable at that offset.
    """

    def __init__(self, message: str, offset: int, expected: frozenset[str] = frozenset()):
        detail = f"{message} at byte {offset}"
        if expected:
            detail += f" (expected one of: {', '.join(sorted(expected))})"
        super().__init__(detail)
        self.offset = offset
        self.expected = expected


class EvalError(NablaError):
    def __init__(self, point: float, message: str = "division by zero"):
        super().__init__(f"{message} at t={point!r}")
        self.point = point
