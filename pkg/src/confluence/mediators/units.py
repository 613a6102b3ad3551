"""Unit parsing and conversion for exchanged values.

Unit strings are space-separated terms of the form ``symbol`` or
``symbol<exponent>``, e.g. ``m s-1`` or ``kg m-3``.  The bare string
``1`` means dimensionless.  Scales are kept as exact rationals so
chained conversions like m/s to km/hr come out on round numbers.
"""

import re
from fractions import Fraction

import numpy as np


class UnitError(Exception):
    """Base class for unit problems."""


class UnknownUnitError(UnitError):
    """A symbol is not in the unit table or a term is malformed."""


class IncompatibleUnitsError(UnitError):
    """Source and target measure different dimensions."""


class UnsupportedUnitsError(UnitError):
    """The conversion is dimensionally fine but not expressible here."""


# symbol -> (scale to base units, offset to base units, dimension)
_TABLE = {
    "m": (Fraction(1), Fraction(0), "length"),
    "km": (Fraction(1000), Fraction(0), "length"),
    "cm": (Fraction(1, 100), Fraction(0), "length"),
    "mm": (Fraction(1, 1000), Fraction(0), "length"),
    "s": (Fraction(1), Fraction(0), "time"),
    "min": (Fraction(60), Fraction(0), "time"),
    "hr": (Fraction(3600), Fraction(0), "time"),
    "d": (Fraction(86400), Fraction(0), "time"),
    "yr": (Fraction(365 * 86400), Fraction(0), "time"),
    "kg": (Fraction(1), Fraction(0), "mass"),
    "g": (Fraction(1, 1000), Fraction(0), "mass"),
    "K": (Fraction(1), Fraction(0), "temperature"),
    "degC": (Fraction(1), Fraction(27315, 100), "temperature"),
}

UNIT_SYMBOLS = tuple(sorted(_TABLE))

_TERM = re.compile(r"^([A-Za-z]+)(-?\d+)?$")


class UnitExpr:
    """A parsed unit string: exact scale, offset, and dimension vector."""

    __slots__ = ("text", "scale", "offset", "dims")

    def __init__(self, text, scale, offset, dims):
        self.text = text
        self.scale = scale
        self.offset = offset
        self.dims = dims

    def __repr__(self):
        return "UnitExpr({!r})".format(self.text)


def parse_units(text):
    if not isinstance(text, str) or not text.strip():
        raise UnknownUnitError("empty unit string")
    text = text.strip()
    if text == "1":
        return UnitExpr(text, Fraction(1), Fraction(0), {})

    scale = Fraction(1)
    offset = Fraction(0)
    dims = {}
    terms = text.split()
    for term in terms:
        match = _TERM.match(term)
        if match is None:
            raise UnknownUnitError("malformed unit term {!r} in {!r}".format(term, text))
        symbol, exp = match.group(1), int(match.group(2) or 1)
        if symbol not in _TABLE:
            raise UnknownUnitError(
                "unknown unit {!r}; known units: {}".format(
                    symbol, ", ".join(UNIT_SYMBOLS)
                )
            )
        unit_scale, unit_offset, dim = _TABLE[symbol]
        if unit_offset != 0 and (len(terms) > 1 or exp != 1):
            raise UnsupportedUnitsError(
                "offset unit {!r} is only supported bare, not in {!r}".format(
                    symbol, text
                )
            )
        scale *= unit_scale ** exp
        offset = unit_offset
        dims[dim] = dims.get(dim, 0) + exp
    dims = {d: e for d, e in dims.items() if e != 0}
    return UnitExpr(text, scale, offset, dims)


def compatible_units(src, dst):
    """True when the two unit strings measure the same dimensions."""
    return parse_units(src).dims == parse_units(dst).dims


def conversion(src, dst):
    """Return (scale, offset) so that dst_value = src_value * scale + offset."""
    a = parse_units(src)
    b = parse_units(dst)
    if a.dims != b.dims:
        raise IncompatibleUnitsError(
            "cannot convert {!r} to {!r}: dimensions differ".format(src, dst)
        )
    scale = a.scale / b.scale
    offset = (a.offset - b.offset) / b.scale
    return float(scale), float(offset)


def convert(values, src, dst):
    """Convert an array (or scalar) of values between unit strings."""
    scale, offset = conversion(src, dst)
    out = np.asarray(values, dtype=float) * scale
    if offset != 0.0:
        out = out + offset
    if np.isscalar(values) or getattr(values, "ndim", 1) == 0:
        return float(out)
    return out
