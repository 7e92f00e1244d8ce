"""Helpers for mixing exact rationals with floats."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union

from src.utils.errors import DomainError

Number = Union[int, float, Fraction]


def is_exact(value: object) -> bool:
    """True for ints and Fractions (bools excluded)."""
    return isinstance(value, Rational) and not isinstance(value, bool)


def to_exact(value: Union[Number, str]) -> Fraction:
    """
    Convert a scalar to a Fraction.

    Floats are read as their shortest decimal literal, so ``0.15`` becomes
    ``3/20`` rather than the nearest binary fraction.

    Args:
        value: int, Fraction, float or a string such as ``"7/10"``

    Returns:
        The exact rational value
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError("booleans are not numbers here")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise DomainError(f"cannot make {value!r} exact")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"not a rational literal: {value!r}") from exc
    raise DomainError(f"unsupported scalar type {type(value).__name__}")
