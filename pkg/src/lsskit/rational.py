"""Exact positive rationals for witness tolerances, serialised as ``"p/q"``."""
from __future__ import annotations

from fractions import Fraction


def parse_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("a boolean is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise ValueError("pass tolerances as 'p/q' strings or integers, not floats")
    text = str(value).strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a rational: {value!r}") from None


def positive(value) -> Fraction:
    eps = parse_rational(value)
    if eps <= 0:
        raise ValueError(f"tolerance must be positive, got {format_rational(eps)}")
    return eps


def format_rational(r: Fraction) -> str:
    return f"{r.numerator}/{r.denominator}"


def ratio_below(delta: int, inter: int, eps: Fraction) -> bool:
    """``delta < eps * inter`` exactly; zero overlap only passes with zero difference."""
    return delta * eps.denominator < eps.numerator * inter


def ratio(delta: int, inter: int) -> Fraction | None:
    """``delta / inter``, or ``None`` for the infinite ratio of disjoint distinct sets."""
    if inter == 0:
        return Fraction(0) if delta == 0 else None
    return Fraction(delta, inter)
