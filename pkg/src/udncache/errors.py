"""Exception hierarchy shared by every module."""
from __future__ import annotations


class UDNError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameter(UDNError, ValueError):
    pass


class UnsupportedMemoryPoint(InvalidParameter):
    """Raised when K*M/N is not an integer (no memory sharing is simulated)."""


class IncompleteDemand(UDNError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class DecodeFailure(UDNError):
    def __init__(self, message: str, missing: list | None = None):
        super().__init__(message)
        self.missing = list(missing or [])


class CountingViolation(UDNError):
    pass


class OracleRefused(UDNError):
    pass


class FieldExhausted(UDNError):
    pass


class DivisionByZero(UDNError, ZeroDivisionError):
    pass


class SingularSystem(UDNError):
    pass


class InsufficientSideInformation(UDNError):
    pass


class MDSViolation(UDNError):
    pass


class UndefinedRatio(UDNError, ValueError):
    pass
