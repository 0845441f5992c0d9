"""Angle parsing: bare numbers are radians, a ``pi`` suffix means multiples of pi."""
from __future__ import annotations

import math
import re
from fractions import Fraction

from .errors import InvalidArgument

_PI_FORM = re.compile(r"^\s*([-+]?[0-9.eE+-]*(?:/[0-9.]+)?)\s*\*?\s*pi\s*$")


def _number(text: str) -> float:
    if "/" in text:
        num, den = text.split("/", 1)
        return float(Fraction(num.strip() or "1")) / float(den)
    return float(text)


def parse_angle(value) -> float:
    """Parse ``1.57``, ``0.5pi``, ``pi``, ``-pi``, ``1/2pi`` or ``2*pi`` to radians."""
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip().lower()
    m = _PI_FORM.match(text)
    try:
        if m:
            coef = m.group(1)
            if coef in ("", "+"):
                factor = 1.0
            elif coef == "-":
                factor = -1.0
            else:
                factor = _number(coef)
            return factor * math.pi
        return _number(text)
    except (ValueError, ZeroDivisionError):
        raise InvalidArgument(f"cannot parse angle {value!r}") from None


def parse_pi_units(value) -> float:
    """Parse a quantity quoted in units of pi; ``2`` and ``2pi`` both mean 2."""
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip().lower()
    if text.endswith("pi"):
        return parse_angle(text) / math.pi
    try:
        return _number(text)
    except (ValueError, ZeroDivisionError):
        raise InvalidArgument(f"cannot parse {value!r}") from None


def format_pi(theta: float) -> str:
    return f"{theta / math.pi!r}pi"
