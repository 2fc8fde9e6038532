# symdyn/dynamics/certified.py
"""Directed-rounding mpfr helpers: every result is an enclosure [lo, hi]."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable

import gmpy2 as gmp
from django.conf import settings

DEFAULT_PRECISION: int = 128


def _prec() -> int:
    return int(getattr(settings, "SYMDYN_LOG_PRECISION", DEFAULT_PRECISION))


def _ctx(rnd):
    return gmp.context(precision=_prec(), round=rnd)


def _q(x: Fraction | int):
    x = Fraction(x)
    return gmp.mpq(x.numerator, x.denominator)


def to_fraction(v) -> Fraction:
    return Fraction(*v.as_integer_ratio())


def log_enclosure(x: Fraction | int) -> tuple:
    """Natural log of a positive rational, rounded outward."""
    if Fraction(x) <= 0:
        raise ValueError("log of a non-positive number")
    with _ctx(gmp.RoundDown):
        lo = gmp.log(gmp.mpfr(_q(x)))
    with _ctx(gmp.RoundUp):
        hi = gmp.log(gmp.mpfr(_q(x)))
    return lo, hi


def add(a: tuple, b: tuple) -> tuple:
    with _ctx(gmp.RoundDown):
        lo = a[0] + b[0]
    with _ctx(gmp.RoundUp):
        hi = a[1] + b[1]
    return lo, hi


def total(items: Iterable[tuple]) -> tuple:
    acc = (gmp.mpfr(0), gmp.mpfr(0))
    for it in items:
        acc = add(acc, it)
    return acc


def divide(a: tuple, b: tuple) -> tuple:
    if b[0] <= 0 <= b[1]:
        raise ZeroDivisionError("divisor enclosure contains zero")
    with _ctx(gmp.RoundDown):
        lo = min(x / y for x in a for y in b)
    with _ctx(gmp.RoundUp):
        hi = max(x / y for x in a for y in b)
    return lo, hi


def subtract_from(k: int | Fraction, a: tuple) -> tuple:
    """k - a."""
    with _ctx(gmp.RoundDown):
        lo = _q(k) - a[1]
    with _ctx(gmp.RoundUp):
        hi = _q(k) - a[0]
    return lo, hi


def log_ratio(num: Fraction, base: Fraction | int) -> tuple:
    """log(num)/log(base) enclosure."""
    return divide(log_enclosure(num), log_enclosure(base))
