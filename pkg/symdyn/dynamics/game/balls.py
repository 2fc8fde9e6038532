# symdyn/dynamics/game/balls.py
"""Closed arcs on the circle [0, 1) with exact centers and radii."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..circle import _fmt, frac
from ..errors import InputError

SHIFTS = (-1, 0, 1)


@dataclass(frozen=True)
class Ball:
    center: Fraction
    radius: Fraction

    def __post_init__(self):
        c, r = frac(self.center), frac(self.radius)
        if r <= 0 or 2 * r >= 1:
            raise InputError(f"ball radius {r} must lie in (0, 1/2)")
        object.__setattr__(self, "center", c % 1)
        object.__setattr__(self, "radius", r)

    @property
    def lo(self) -> Fraction:
        return self.center - self.radius

    @property
    def hi(self) -> Fraction:
        return self.center + self.radius

    @property
    def arc(self) -> tuple[Fraction, Fraction]:
        return (self.lo, self.hi)

    @property
    def diameter(self) -> Fraction:
        return 2 * self.radius

    def contains_interval(self, lo: Fraction, hi: Fraction) -> bool:
        return any(self.lo <= lo + k and hi + k <= self.hi for k in SHIFTS)

    def inside(self, lo: Fraction, hi: Fraction) -> bool:
        """True iff the arc lies in [lo, hi] for some lift."""
        return any(lo + k <= self.lo and self.hi <= hi + k for k in SHIFTS)

    def contains_ball(self, other: "Ball") -> bool:
        return self.contains_interval(other.lo, other.hi)

    def contains_point(self, x: Fraction) -> bool:
        return self.contains_interval(x, x)

    def overlap(self, lo: Fraction, hi: Fraction) -> Fraction:
        best = Fraction(0)
        for k in SHIFTS:
            best = max(best, min(self.hi, hi + k) - max(self.lo, lo + k))
        return best

    def offset_of(self, x: Fraction) -> Fraction:
        """Position of x measured from the left end of the arc, in [0, 1)."""
        return (x - self.lo) % 1

    def shrink(self, ratio: Fraction) -> "Ball":
        return Ball(self.center, self.radius * ratio)

    def to_json(self) -> dict:
        return {"center": _fmt(self.center), "radius": _fmt(self.radius)}


def ball_in_interval(lo: Fraction, hi: Fraction, radius: Fraction) -> Ball:
    """The ball of ``radius`` centered at the midpoint of [lo, hi]."""
    if 2 * radius > hi - lo:
        raise InputError(f"interval [{lo}, {hi}] is too short for radius {radius}")
    return Ball((lo + hi) / 2, radius)


def legal_centers(outer: Ball, radius: Fraction) -> tuple[Fraction, Fraction]:
    """Lifted range of centers whose ball of ``radius`` stays inside ``outer``."""
    if radius > outer.radius:
        raise InputError("inner radius exceeds outer radius")
    return (outer.lo + radius, outer.hi - radius)


def clamp_toward(outer: Ball, radius: Fraction, target: Fraction) -> Ball:
    """The legal ball of ``radius`` inside ``outer`` whose center is closest to ``target``."""
    a, b = legal_centers(outer, radius)
    target = frac(target)
    best = None
    for k in SHIFTS:
        t = target + k
        c = min(max(t, a), b)
        d = abs(c - t)
        if best is None or d < best[0]:
            best = (d, c)
    return Ball(best[1], radius)
