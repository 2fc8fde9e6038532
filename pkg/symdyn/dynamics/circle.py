# symdyn/dynamics/circle.py
"""
Markov partitions of piecewise-linear expanding circle maps, in exact
rational arithmetic.

The circle is [0, 1) with 0 ≡ 1. Elements are closed intervals inside
[0, 1]; every branch of the map is affine on every element, so for a
cylinder R_α the iterate T^n maps R_α affinely onto R_{α_n}. Everything
below (refinement, distortion, fitting) leans on that fact.
"""
from __future__ import annotations

import bisect
import math
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

from django.conf import settings

from .errors import DefectError, InputError, PartitionValidationError, ResourceError
from .sft import TransitionSystem, Word, as_tuple, count_words, is_valid_word

log = logging.getLogger(__name__)

Interval = tuple[Fraction, Fraction]
ONE = Fraction(1)
ZERO = Fraction(0)


def frac(x) -> Fraction:
    """Accepts ints, Fractions and "p/q" strings."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise InputError(f"floats are not accepted as exact rationals: {x!r}")
    try:
        return Fraction(str(x).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse rational {x!r}") from exc


# ----------------------------------------------------------------------------
# Maps
# ----------------------------------------------------------------------------
@dataclass(frozen=True)
class ExpandingCircleMap:
    """
    Circle map given by a lift L on [0, 1]: affine with slope ``slopes[k]`` on
    [breakpoints[k], breakpoints[k+1]], L(0) = ``offset``.

    Linear degree-m maps are the one-piece case.
    """

    kind: str
    breakpoints: tuple[Fraction, ...]
    slopes: tuple[Fraction, ...]
    offset: Fraction = ZERO

    def __post_init__(self):
        bps = tuple(frac(b) for b in self.breakpoints)
        sls = tuple(frac(s) for s in self.slopes)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "slopes", sls)
        object.__setattr__(self, "offset", frac(self.offset))
        if not bps or bps[0] != 0:
            raise InputError("map breakpoints must start at 0")
        if any(b >= c for b, c in zip(bps, bps[1:])) or bps[-1] >= 1:
            raise InputError("map breakpoints must increase inside [0, 1)")
        if len(sls) != len(bps):
            raise InputError("one slope per map piece")
        if any(s <= 1 for s in sls):
            raise InputError("every slope must exceed 1 (orientation-preserving expanding map)")
        deg = self.lift(ONE) - self.lift(ZERO)
        if deg.denominator != 1 or deg < 2:
            raise InputError(f"lift increment {deg} is not an integer degree >= 2")

    @classmethod
    def linear(cls, m: int) -> "ExpandingCircleMap":
        if int(m) < 2:
            raise InputError("degree must be at least 2")
        return cls("linear", (ZERO,), (Fraction(int(m)),))

    @classmethod
    def piecewise(cls, breakpoints: Sequence, slopes: Sequence, offset=0) -> "ExpandingCircleMap":
        return cls("piecewise-linear", tuple(breakpoints), tuple(slopes), offset)

    @cached_property
    def _knots(self) -> tuple[Fraction, ...]:
        vals = [self.offset]
        ends = self.breakpoints[1:] + (ONE,)
        for b, e, s in zip(self.breakpoints, ends, self.slopes):
            vals.append(vals[-1] + s * (e - b))
        return tuple(vals)

    def _piece(self, x: Fraction) -> int:
        return max(0, bisect.bisect_right(self.breakpoints, x) - 1)

    def lift(self, x: Fraction) -> Fraction:
        x = frac(x)
        if x == ONE:
            return self._knots[-1]
        k = self._piece(x)
        return self._knots[k] + self.slopes[k] * (x - self.breakpoints[k])

    def __call__(self, x: Fraction) -> Fraction:
        return self.lift(x) % 1

    @property
    def degree(self) -> int:
        return int(self._knots[-1] - self._knots[0])

    @property
    def lam(self) -> Fraction:
        return min(self.slopes)

    @property
    def delta_T(self) -> Fraction:
        return 1 / max(self.slopes)

    def slope_on(self, a: Fraction, b: Fraction) -> Fraction | None:
        """The slope if [a, b] sits inside one affine piece, else None."""
        k = self._piece(a)
        nxt = self.breakpoints[k + 1] if k + 1 < len(self.breakpoints) else ONE
        return self.slopes[k] if b <= nxt else None

    def preimages(self, y: Fraction) -> list[Fraction]:
        y = frac(y) % 1
        out: set[Fraction] = set()
        ends = self.breakpoints[1:] + (ONE,)
        for k, (b, e, s) in enumerate(zip(self.breakpoints, ends, self.slopes)):
            lo, hi = self._knots[k], self._knots[k + 1]
            t = math.ceil(lo - y)
            while y + t <= hi:
                out.add((b + (y + t - lo) / s) % 1)
                t += 1
        return sorted(out)

    def to_json(self) -> dict:
        if self.kind == "linear":
            return {"kind": "linear", "m": self.degree}
        return {
            "kind": "piecewise-linear",
            "breakpoints": [_fmt(b) for b in self.breakpoints],
            "slopes": [_fmt(s) for s in self.slopes],
            "offset": _fmt(self.offset),
        }


def _fmt(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


# ----------------------------------------------------------------------------
# Cylinders
# ----------------------------------------------------------------------------
@dataclass(frozen=True)
class CylinderSet:
    word: Word
    lo: Fraction
    hi: Fraction

    @property
    def interval(self) -> Interval:
        return (self.lo, self.hi)

    @property
    def measure(self) -> Fraction:
        return self.hi - self.lo

    diameter = measure

    @property
    def generation(self) -> int:
        return len(self.word) - 1

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x: Fraction) -> bool:
        x = Fraction(x) % 1
        return self.lo <= x <= self.hi or (x == 0 and self.hi == 1)

    def interior_contains(self, x: Fraction) -> bool:
        x = Fraction(x) % 1
        return self.lo < x < self.hi

    def endpoints(self) -> tuple[Fraction, Fraction]:
        return (self.lo, self.hi % 1)


# ----------------------------------------------------------------------------
# Partitions
# ----------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class MarkovPartition:
    map: ExpandingCircleMap
    breakpoints: tuple[Fraction, ...]
    order: tuple[int, ...]
    endpoint_tolerant: bool
    ts: TransitionSystem
    elements: tuple[Interval, ...]              # by letter (index letter-1)
    children: tuple[dict, ...] = field(repr=False)   # letter-1 -> {j: (lo, hi)}
    C: Fraction = ONE
    small_diameter_ok: bool = True

    # -- basic geometry --------------------------------------------------
    @property
    def size(self) -> int:
        return self.ts.size

    def element(self, letter: int) -> Interval:
        return self.elements[letter - 1]

    def measure(self, letter: int) -> Fraction:
        lo, hi = self.element(letter)
        return hi - lo

    @property
    def r(self) -> Fraction:
        ms = [self.measure(i) for i in self.ts.letters]
        return min(ms) / max(ms)

    @property
    def min_diameter(self) -> Fraction:
        return min(self.measure(i) for i in self.ts.letters)

    @property
    def max_diameter(self) -> Fraction:
        return max(self.measure(i) for i in self.ts.letters)

    @property
    def lam(self) -> Fraction:
        return self.map.lam

    @property
    def delta_T(self) -> Fraction:
        return self.map.delta_T

    @property
    def is_uniform(self) -> bool:
        return self.map.kind == "linear" and len({self.measure(i) for i in self.ts.letters}) == 1

    @property
    def has_degenerate(self) -> bool:
        return any(self.ts.is_degenerate(i) for i in self.ts.letters)

    def letters_at(self, x: Fraction) -> list[int]:
        x = Fraction(x) % 1
        return [
            i for i in self.ts.letters
            if self.elements[i - 1][0] <= x <= self.elements[i - 1][1]
            or (x == 0 and self.elements[i - 1][1] == 1)
        ]

    def T(self, x: Fraction) -> Fraction:
        return self.map(x)

    # -- relabeling ------------------------------------------------------
    def swap_letters(self, i: int, j: int) -> "MarkovPartition":
        """Exchange the names of two elements; the geometry is untouched."""
        order = list(self.order)
        order[i - 1], order[j - 1] = order[j - 1], order[i - 1]
        return build_custom_partition(self.map, self.breakpoints, self.endpoint_tolerant, tuple(order))

    # -- cylinders -------------------------------------------------------
    def refine(self, cyl: CylinderSet, j: int) -> CylinderSet:
        last = cyl.word[-1]
        clo, chi = self.children[last - 1][j]
        elo, ehi = self.element(last)
        scale = cyl.measure / (ehi - elo)
        return CylinderSet(
            Word(cyl.word.letters + (j,)),
            cyl.lo + (clo - elo) * scale,
            cyl.lo + (chi - elo) * scale,
        )

    def weight(self, i: int, j: int) -> Fraction:
        """σ(R_ij)/σ(R_i)."""
        clo, chi = self.children[i - 1][j]
        return (chi - clo) / self.measure(i)

    def base(self, letter: int) -> CylinderSet:
        lo, hi = self.element(letter)
        return CylinderSet(Word((letter,)), lo, hi)

    def generation(self, n: int) -> Iterator[CylinderSet]:
        """All cylinders of G(n), in lexicographic word order."""
        stack = [self.base(i) for i in reversed(self.ts.letters)]
        while stack:
            c = stack.pop()
            if c.generation == n:
                yield c
                continue
            for j in reversed(self.ts.successors[c.word[-1]]):
                stack.append(self.refine(c, j))

    def map_interval(self, lo: Fraction, hi: Fraction) -> Interval:
        """T([lo, hi]) for an interval inside one element."""
        s = self.map.slope_on(lo, hi)
        if s is None:
            raise InputError(f"[{lo}, {hi}] crosses a slope break")
        u = self.map.lift(lo) % 1
        return (u, u + s * (hi - lo))

    def to_json(self) -> dict:
        out = {
            "map": self.map.to_json(),
            "breakpoints": [_fmt(b) for b in self.breakpoints],
            "endpoint_tolerant": self.endpoint_tolerant,
        }
        if self.order != tuple(range(len(self.order))):
            out["letters"] = [k + 1 for k in self.order]
        return out


def _overlap(a: Interval, b: Interval) -> Fraction:
    return min(a[1], b[1]) - max(a[0], b[0])


def _arc_overlaps(arc: Interval, el: Interval) -> bool:
    return any(_overlap((arc[0] + k, arc[1] + k), el) > 0 for k in (-1, 0, 1))


def build_custom_partition(
    tmap: ExpandingCircleMap,
    breakpoints: Sequence,
    endpoint_tolerant: bool = False,
    order: Sequence[int] | None = None,
) -> MarkovPartition:
    bps = tuple(frac(b) for b in breakpoints)
    if not bps or bps[0] != 0:
        raise PartitionValidationError("wrap", "0 must be a breakpoint", None)
    if any(b >= c for b, c in zip(bps, bps[1:])):
        raise PartitionValidationError("(2)", "breakpoints must be strictly increasing", bps)
    if bps[-1] >= 1:
        raise PartitionValidationError("(1)", "breakpoints must lie in [0, 1)", (bps[-1], ONE))
    if len(bps) < 2:
        raise PartitionValidationError("(1)", "a partition needs at least two elements", (ZERO, ONE))
    spatial = [(b, e) for b, e in zip(bps, bps[1:] + (ONE,))]
    if sum(e - b for b, e in spatial) != 1:
        raise PartitionValidationError("(1)", "elements do not cover the circle", (ZERO, ONE))

    k = len(spatial)
    order = tuple(range(k)) if order is None else tuple(int(o) for o in order)
    if sorted(order) != list(range(k)):
        raise InputError(f"letter order {order} is not a permutation of {k} elements")
    elements = tuple(spatial[o] for o in order)

    small_ok = True
    images: list[Interval] = []
    slopes: list[Fraction] = []
    for letter, (a, b) in enumerate(elements, start=1):
        s = tmap.slope_on(a, b)
        if s is None:
            raise PartitionValidationError("distortion", f"the map changes slope inside R_{letter}", (a, b))
        span = s * (b - a)
        if span > 1:
            raise PartitionValidationError("small-diameter", f"T is not injective on R_{letter}", (a, b))
        if b - a >= tmap.delta_T:
            small_ok = small_ok and endpoint_tolerant and b - a == tmap.delta_T
        if span < 1:
            ua = tmap.lift(a) % 1
            ub = tmap.lift(b) % 1
            for u in (ua, ub):
                if u not in bps:
                    raise PartitionValidationError(
                        "(5)", f"T(R_{letter}) is not a union of elements; {_fmt(u)} is not a breakpoint",
                        (a, b),
                    )
        u = tmap.lift(a) % 1
        images.append((u, u + span))
        slopes.append(s)

    matrix = tuple(
        tuple(1 if (images[i][1] - images[i][0] == 1 or _arc_overlaps(images[i], elements[j])) else 0
              for j in range(k))
        for i in range(k)
    )
    ts = TransitionSystem(k, matrix)

    children = []
    for i, (a, b) in enumerate(elements):
        la = tmap.lift(a)
        lb = tmap.lift(b)
        kids = {}
        for j in range(k):
            if not matrix[i][j]:
                continue
            c, d = elements[j]
            t = math.ceil(la - c)
            while not (la <= c + t and d + t <= lb):
                t += 1
                if c + t > lb:
                    raise DefectError(f"no lift of R_{j + 1} inside the image of R_{i + 1}")
            kids[j + 1] = (a + (c + t - la) / slopes[i], a + (d + t - la) / slopes[i])
        children.append(kids)

    if not small_ok:
        log.warning("partition: some element has diameter >= delta_T without the endpoint-tolerant flag")
    p = MarkovPartition(
        map=tmap,
        breakpoints=bps,
        order=order,
        endpoint_tolerant=bool(endpoint_tolerant),
        ts=ts,
        elements=elements,
        children=tuple(children),
        C=ONE,
        small_diameter_ok=small_ok,
    )
    log.debug("partition: %s elements, matrix %s", k, matrix)
    return p


def build_uniform_partition(m: int, s_exponent: int) -> MarkovPartition:
    if int(m) < 2 or int(s_exponent) < 1:
        raise InputError("need m >= 2 and s_exponent >= 1")
    k = int(m) ** int(s_exponent)
    bps = [Fraction(i, k) for i in range(k)]
    return build_custom_partition(ExpandingCircleMap.linear(m), bps, endpoint_tolerant=(s_exponent == 1))


def cylinder(p: MarkovPartition, alpha) -> CylinderSet:
    letters = as_tuple(alpha)
    if not letters:
        raise InputError("cylinders need a non-empty word")
    if not is_valid_word(p.ts, letters):
        raise InputError(f"word {Word(letters)} is not valid")
    c = p.base(letters[0])
    for j in letters[1:]:
        c = p.refine(c, j)
    return c


# ----------------------------------------------------------------------------
# Representations and boundary
# ----------------------------------------------------------------------------
@dataclass(frozen=True)
class Representation:
    point: Fraction
    depth: int
    words: tuple[Word, ...]
    count_bound: int

    @property
    def count(self) -> int:
        return len(self.words)

    def letters(self, t: int, partition: MarkovPartition) -> Iterator[int]:
        """Lazy letters of the t-th representation, past any depth."""
        c = cylinder(partition, self.words[t])
        yield from c.word.letters
        while True:
            nxt = [j for j in partition.ts.successors[c.word[-1]]
                   if partition.refine(c, j).contains(self.point)]
            if not nxt:
                raise DefectError(f"representation of {self.point} cannot be continued")
            c = partition.refine(c, nxt[0])
            yield nxt[0]


def _containing(p: MarkovPartition, x: Fraction, depth: int) -> list[CylinderSet]:
    level = [p.base(i) for i in p.letters_at(x)]
    for _ in range(depth):
        nxt = []
        for c in level:
            for j in p.ts.successors[c.word[-1]]:
                child = p.refine(c, j)
                if child.contains(x):
                    nxt.append(child)
        level = nxt
    return level


@lru_cache(maxsize=64)
def _p0(p: MarkovPartition) -> int:
    depth = p.size + 1
    return max(len(_containing(p, b, depth)) for b in p.breakpoints)


def representations_of(p: MarkovPartition, x, depth: int) -> Representation:
    x = frac(x) % 1
    if depth < 0:
        raise InputError("depth must be non-negative")
    cyls = _containing(p, x, depth)
    return Representation(x, depth, tuple(c.word for c in cyls), _p0(p))


@dataclass
class InvarianceReport:
    ok: bool
    depth: int
    checked: int
    failures: list[dict] = field(default_factory=list)


class BoundaryStructure:
    """∂_n = union of boundaries of G(n) cylinders, and the queries built on it."""

    def __init__(self, p: MarkovPartition):
        self.p = p
        self._points: dict[int, frozenset[Fraction]] = {}

    def points(self, n: int) -> frozenset[Fraction]:
        if n not in self._points:
            cap = int(getattr(settings, "SYMDYN_ENUMERATION_CAP", 10_000_000))
            if count_words(self.p.ts, n) > cap:
                raise ResourceError(f"G({n}) is larger than the enumeration cap")
            pts = set()
            for c in self.p.generation(n):
                pts.update(c.endpoints())
            self._points[n] = frozenset(pts)
        return self._points[n]

    def contains(self, x: Fraction, n: int) -> bool:
        x = frac(x) % 1
        for c in _containing(self.p, x, n):
            if x in c.endpoints():
                return True
        return False

    def weight(self, x, max_depth: int | None = None) -> int | None:
        x = frac(x) % 1
        max_depth = int(getattr(settings, "SYMDYN_BOUNDARY_DEPTH", 64)) if max_depth is None else max_depth
        level = [self.p.base(i) for i in self.p.letters_at(x)]
        for n in range(max_depth + 1):
            if any(x in c.endpoints() for c in level):
                return n
            nxt = []
            for c in level:
                for j in self.p.ts.successors[c.word[-1]]:
                    child = self.p.refine(c, j)
                    if child.contains(x):
                        nxt.append(child)
            level = nxt
        return None

    def forward_invariance_check(self, depth: int) -> InvarianceReport:
        """T(∂_n) ⊆ ∂_{n-1} for n = depth (∂_0 maps into ∂_0)."""
        target = self.points(max(depth - 1, 0))
        rep = InvarianceReport(True, depth, 0)
        for y in sorted(self.points(depth)):
            rep.checked += 1
            ty = self.p.T(y)
            if ty not in target:
                rep.ok = False
                rep.failures.append({"point": _fmt(y), "image": _fmt(ty)})
        return rep

    def backward_invariance_check(self, depth: int) -> InvarianceReport:
        """Every preimage of a point of ∂_n lies in ∂_{n+1}."""
        target = self.points(depth + 1)
        rep = InvarianceReport(True, depth, 0)
        for y in sorted(self.points(depth)):
            for x in self.p.map.preimages(y):
                rep.checked += 1
                if x not in target:
                    rep.ok = False
                    rep.failures.append({"point": _fmt(y), "preimage": _fmt(x)})
        return rep

    def adjacency_set(self, x, N: int) -> list[CylinderSet]:
        """Φ_N(x): the generation-N cylinders containing x."""
        return _containing(self.p, frac(x) % 1, N)


def boundary_ops(p: MarkovPartition) -> BoundaryStructure:
    return BoundaryStructure(p)


# ----------------------------------------------------------------------------
# Distortion
# ----------------------------------------------------------------------------
class DistortionProfile:
    """
    ε(q) / 𝓔(q): min / max of σ(R_δ)/σ(R_{δ_0}) over δ ∈ Σ(q);
    ε_η(q) / 𝓔_η(q): min / max of σ(R_{ηβ})/σ(R_η) over q-letter extensions.

    Ratios factor into one-step weights along the word, so both are exact
    min/max-product path problems; ``*_enumerated`` recomputes them by
    walking Σ(q) for cross-checks.
    """

    def __init__(self, p: MarkovPartition):
        self.p = p
        self._lo: list[dict[int, Fraction]] = [{i: ONE for i in p.ts.letters}]
        self._hi: list[dict[int, Fraction]] = [{i: ONE for i in p.ts.letters}]

    def _extend(self, q: int) -> None:
        ts = self.p.ts
        while len(self._lo) <= q:
            plo, phi = self._lo[-1], self._hi[-1]
            self._lo.append({i: min(self.p.weight(i, j) * plo[j] for j in ts.successors[i]) for i in ts.letters})
            self._hi.append({i: max(self.p.weight(i, j) * phi[j] for j in ts.successors[i]) for i in ts.letters})

    def eps(self, q: int) -> Fraction:
        self._extend(q)
        return min(self._lo[q].values())

    def Eps(self, q: int) -> Fraction:
        self._extend(q)
        return max(self._hi[q].values())

    def eps_eta(self, eta, q: int) -> Fraction:
        self._extend(q)
        return self._lo[q][as_tuple(eta)[-1]]

    def Eps_eta(self, eta, q: int) -> Fraction:
        self._extend(q)
        return self._hi[q][as_tuple(eta)[-1]]

    def _ratios(self, q: int) -> Iterator[Fraction]:
        cap = int(getattr(settings, "SYMDYN_ENUMERATION_CAP", 10_000_000))
        if count_words(self.p.ts, q) > cap:
            raise ResourceError(f"Σ({q}) is larger than the enumeration cap")
        for c in self.p.generation(q):
            yield c.measure / self.p.measure(c.word[0])

    def eps_enumerated(self, q: int) -> Fraction:
        return min(self._ratios(q))

    def Eps_enumerated(self, q: int) -> Fraction:
        return max(self._ratios(q))


@lru_cache(maxsize=64)
def distortion(p: MarkovPartition) -> DistortionProfile:
    return DistortionProfile(p)


# ----------------------------------------------------------------------------
# Interval fitting
# ----------------------------------------------------------------------------
@dataclass(frozen=True)
class FitResult:
    N: int
    eta: CylinderSet
    eta_i: CylinderSet
    case: str
    split: Fraction | None = None
    half: Interval | None = None


def _meeting(p: MarkovPartition, level: list[CylinderSet], H: Interval) -> list[CylinderSet]:
    out = []
    for c in level:
        for j in p.ts.successors[c.word[-1]]:
            child = p.refine(c, j)
            if _overlap(child.interval, H) > 0:
                out.append(child)
    return out


def _normalize_half(lo: Fraction, hi: Fraction, y: Fraction) -> tuple[Interval, Fraction]:
    if hi <= 0:
        return (lo + 1, hi + 1), y + 1
    if lo >= 1:
        return (lo - 1, hi - 1), y - 1
    return (lo, hi), y


def _fit_half(p: MarkovPartition, lo: Fraction, hi: Fraction, y: Fraction, weight: int, case: str) -> FitResult:
    """
    Fits the longer of [lo, y] and [y, hi]. Equal halves take [y, hi]: the
    B = [3/8, 5/8] case on the dyadic partition must land on R_η = [1/2, 3/4],
    and that fixes the tie rule over a leftmost choice.
    """
    minus, plus = (lo, y), (y, hi)
    raw = plus if plus[1] - plus[0] >= minus[1] - minus[0] else minus
    H, yy = _normalize_half(raw[0], raw[1], y)
    level = [p.base(i) for i in p.ts.letters if _overlap(p.element(i), H) > 0]
    for _ in range(weight):
        level = _meeting(p, level, H)
    n = weight
    while True:
        n += 1
        parent = level
        level = _meeting(p, level, H)
        ends = sorted({e for c in level for e in (c.lo, c.hi) if H[0] <= e <= H[1] and e != yy})
        if ends:
            break
        if n > 100_000:
            raise DefectError("interval fitting did not terminate")
    if len(parent) != 1:
        raise DefectError(f"half {H} meets {len(parent)} cylinders of G({n - 1})")
    eta = parent[0]
    eta_i = min(
        (c for c in level if yy in (c.lo, c.hi)),
        key=lambda c: c.measure,
    )
    return FitResult(n, eta, eta_i, case, y, H)


def fit_interval(p: MarkovPartition, B, within: CylinderSet | None = None) -> FitResult:
    """
    Fits a short closed arc B = (lo, hi) (lifts allowed outside [0, 1]) to a
    cylinder R_η ∈ G(N-1) with 2 d(R_η) >= d(B) >= ε(1)/C · d(R_η) and a
    child R_ηi ⊂ B ∩ R_η.
    """
    lo, hi = frac(B[0]), frac(B[1])
    if hi <= lo:
        raise InputError("B must have positive length")
    d = hi - lo
    if d >= p.min_diameter:
        raise InputError(f"d(B) = {d} is not below the smallest element diameter {p.min_diameter}")

    zero = [b + k for b in p.breakpoints for k in (-1, 0, 1) if lo <= b + k <= hi]
    if zero:
        res = _fit_half(p, lo, hi, zero[0], 0, "1")
    else:
        if within is not None and within.lo < lo and hi < within.hi:
            level, n = [within], within.generation
        else:
            level = [p.base(i) for i in p.ts.letters if _overlap(p.element(i), (lo, hi)) > 0]
            n = 0
        while True:
            n += 1
            parent = level
            level = _meeting(p, level, (lo, hi))
            pts = sorted({e for c in level for e in (c.lo, c.hi) if lo <= e <= hi})
            if pts:
                break
        if len(pts) >= 2:
            if len(parent) != 1:
                raise DefectError(f"B meets {len(parent)} cylinders of G({n - 1})")
            inside = [c for c in level if lo <= c.lo and c.hi <= hi]
            res = FitResult(n, parent[0], min(inside, key=lambda c: c.lo), "2A", None, (lo, hi))
        else:
            res = _fit_half(p, lo, hi, pts[0], n, "2B")

    eps1 = distortion(p).eps(1)
    if not (2 * res.eta.measure >= d >= eps1 / p.C * res.eta.measure):
        raise DefectError(f"fit bounds fail: d(B)={d}, d(R_eta)={res.eta.measure}, case {res.case}")
    log.debug("fit: case %s, N=%s, eta=%s", res.case, res.N, res.eta.word)
    return res
