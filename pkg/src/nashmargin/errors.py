"""Exception classes. Each class maps to one CLI exit status."""

from __future__ import annotations


class NashMarginError(Exception):
    exit_code = 1


class InputError(NashMarginError, ValueError):
    """Malformed or inconsistent input (bad profile, shape mismatch, ...)."""

    exit_code = 1


class ValidationError(InputError):
    """A document or parameter violates a documented constraint."""


class CapacityError(NashMarginError):
    """An operation would exceed its enumeration budget."""

    exit_code = 2


class DomainError(NashMarginError):
    """The operation is undefined for this input (e.g. margin of a non-Nash profile)."""

    exit_code = 3


class InvariantViolation(NashMarginError, AssertionError):
    """A proven guarantee failed to hold; signals a bug."""

    exit_code = 4
