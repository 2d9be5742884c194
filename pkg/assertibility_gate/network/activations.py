"""
Outward-rounded rational enclosures of sigmoid and tanh.

MPFR evaluates the function with directed rounding at ``precision_bits + GUARD_BITS``
working bits; the result is then snapped outward to the dyadic grid 2**-precision_bits,
so every endpoint is an exact rational and the true value always lies inside.
"""
import math
from fractions import Fraction

import gmpy2 as gmp

from ..helpers.errors import ParseError
from ..intervals import Interval
from .models import MonotoneFunction

GUARD_BITS = 16


def _context(precision: int, round_mode):
    return gmp.context(
        precision=precision,
        emin=gmp.get_emin_min(),
        emax=gmp.get_emax_max(),
        round=round_mode,
    )


def _to_mpq(value: Fraction):
    return gmp.mpq(value.numerator, value.denominator)


def _to_fraction(value) -> Fraction:
    exact = gmp.mpq(value)
    return Fraction(int(exact.numerator), int(exact.denominator))


def _tanh_bound(x: Fraction, precision: int, upward: bool) -> Fraction:
    """A rational lower (or upper) bound of tanh(x)."""
    q = _to_mpq(x)
    round_mode = gmp.RoundUp if upward else gmp.RoundDown
    with _context(precision, round_mode):
        arg = gmp.mpfr(q)
        # Conversion must not cross the exact argument in the wrong direction.
        if upward and gmp.mpq(arg) < q:
            arg = gmp.next_above(arg)
        elif not upward and gmp.mpq(arg) > q:
            arg = gmp.next_below(arg)
        value = gmp.tanh(arg)
    return _to_fraction(value)


def snap_down(value: Fraction, precision_bits: int) -> Fraction:
    scale = 1 << precision_bits
    return Fraction(math.floor(value * scale), scale)


def snap_up(value: Fraction, precision_bits: int) -> Fraction:
    scale = 1 << precision_bits
    return Fraction(math.ceil(value * scale), scale)


def _bound(
    function_id: MonotoneFunction,
    x: Fraction,
    precision_bits: int,
    upward: bool,
) -> Fraction:
    precision = precision_bits + GUARD_BITS
    function_id = MonotoneFunction(function_id)
    if function_id is MonotoneFunction.TANH:
        raw = _tanh_bound(x, precision, upward)
    elif function_id is MonotoneFunction.SIGMOID:
        # sigmoid(x) = (1 + tanh(x/2)) / 2, exact outside the tanh call
        raw = (1 + _tanh_bound(x / 2, precision, upward)) / 2
    else:
        raise ParseError(f"Unsupported monotone function {function_id!r}")
    return snap_up(raw, precision_bits) if upward else snap_down(raw, precision_bits)


def monotone_lower(function_id: MonotoneFunction, x: Fraction, precision_bits: int) -> Fraction:
    return _bound(function_id, x, precision_bits, upward=False)


def monotone_upper(function_id: MonotoneFunction, x: Fraction, precision_bits: int) -> Fraction:
    return _bound(function_id, x, precision_bits, upward=True)


def monotone_enclosure(
    function_id: MonotoneFunction,
    interval: Interval,
    precision_bits: int,
) -> Interval:
    """
    Enclose f([lo, hi]) for an increasing f as [down(f(lo)), up(f(hi))].

    :param function_id: (MonotoneFunction) sigmoid or tanh
    :param interval: (Interval) Input range
    :param precision_bits: (int) Dyadic grid of the endpoints
    :return: (Interval)
    """
    return Interval(
        monotone_lower(function_id, interval.lo, precision_bits),
        monotone_upper(function_id, interval.hi, precision_bits),
    )
