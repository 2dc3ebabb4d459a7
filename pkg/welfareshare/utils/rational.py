"""Exact rational parsing and formatting"""

import decimal
from fractions import Fraction

from welfareshare.exceptions import InstanceError


def parse_rational(value, allow_float=False):
    """
    Convert a JSON value to an exact Fraction.

    Accepted: int, "p/q", integer strings, decimal strings ("0.25", "-1e-3"),
    decimal.Decimal. Binary floats are rejected unless allow_float is set,
    in which case the float is taken at its exact binary value.
    """
    if isinstance(value, bool):
        raise InstanceError(f"Boolean is not a valuation: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, decimal.Decimal):
        if not allow_float:
            raise InstanceError(
                f"Bare JSON number {value} is not accepted; quote it as a string or pass --allow-float"
            )
        return Fraction(value)
    if isinstance(value, float):
        if not allow_float:
            raise InstanceError(f"Float {value!r} rejected; pass --allow-float to accept binary floats")
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            # Fraction parses "p/q", integers and decimal strings exactly
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as e:
            raise InstanceError(f"Cannot parse rational {value!r}: {e}") from e
    raise InstanceError(f"Unsupported value type {type(value).__name__}: {value!r}")


def format_rational(x):
    """Render a Fraction as "p" or "p/q" (parse_rational round-trips it)"""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def approx(x, digits=6):
    """Decimal rendering with `digits` significant digits, for display only"""
    x = Fraction(x)
    with decimal.localcontext() as ctx:
        ctx.prec = digits
        value = +(decimal.Decimal(x.numerator) / decimal.Decimal(x.denominator))
    if value == value.to_integral_value():
        return f"{value.to_integral_value():f}"
    return f"{value:f}"


def as_fractions(values):
    return tuple(Fraction(v) for v in values)
