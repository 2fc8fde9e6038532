# symdyn/dynamics/treelike.py
"""
Avoidance collections E_k(q) and the tree-like dimension lower bound.

Level k holds the cylinders of Σ(kq) whose words avoid every target:
anywhere in the word for the ``tseng`` variant, only in the aligned blocks
α[jq : jq+q+1] for ``urbanski``. Two builders produce the same numbers:

- explicit: word lists, symbolic substring checks, exact cylinder intervals;
- compressed: counts, largest measure and one witness word per automaton
  state, so that k = 50 never touches Σ(kq).
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from django.conf import settings

from . import certified
from .circle import MarkovPartition, cylinder, distortion
from .errors import CollectionDeathError, InputError
from .matching import _matches, serial_extend
from .oracle import AvoidanceAutomaton
from .sft import Word, is_valid_word, iter_words, word_list

log = logging.getLogger(__name__)

TSENG = "tseng"
URBANSKI = "urbanski"
VARIANTS = (TSENG, URBANSKI)

Letters = tuple[int, ...]
State = tuple[int, int]

EXPLICIT_LIMIT: int = 200_000


@dataclass
class StateInfo:
    count: int
    max_measure: Fraction
    witness: Letters


@dataclass
class TreeLikeCollection:
    p: MarkovPartition
    gammas: tuple[Letters, ...]
    q: int
    k_max: int
    variant: str
    first_letter: int | None = None
    counts: list[int] = field(default_factory=list)
    diams: list[Fraction] = field(default_factory=list)
    deltas: list[Fraction] = field(default_factory=list)
    levels: list[list[Letters]] | None = None
    profiles: list[dict[State, StateInfo]] = field(default_factory=list, repr=False)
    death_level: int | None = None
    dim_M: int = 1
    automaton: AvoidanceAutomaton | None = field(default=None, repr=False)
    density_cache: dict[State, Fraction] = field(default_factory=dict, repr=False)

    @property
    def compressed(self) -> bool:
        return self.levels is None

    def level_words(self, k: int) -> list[Word]:
        if self.levels is None:
            raise InputError("this collection was built compressed; rebuild with explicit=True")
        return [Word(w) for w in self.levels[k - 1]]

    def cylinders(self, k: int):
        """Level k rehydrated as cylinder intervals."""
        return [cylinder(self.p, w) for w in self.level_words(k)]

    def contains(self, k: int, alpha) -> bool:
        """Symbolic membership R_α ∈ E_k, independent of what was built."""
        a = Word.of(alpha).letters
        if len(a) != k * self.q + 1 or not is_valid_word(self.p.ts, a):
            return False
        if self.first_letter is not None and a[0] != self.first_letter:
            return False
        return _avoids(a, self.gammas, self.q, self.variant)


@dataclass
class DensityReport:
    k: int
    densities: dict[str, Fraction]
    delta: Fraction
    witnesses: list[Word]


# ----------------------------------------------------------------------------
# Membership
# ----------------------------------------------------------------------------
def _avoids(w: Letters, gammas: Sequence[Letters], q: int, variant: str) -> bool:
    if variant == TSENG:
        return not any(_matches(g, w) for g in gammas)
    blocks = {w[j:j + q + 1] for j in range(0, len(w) - q, q)}
    return not any(g in blocks for g in gammas)


def _new_ok(w: Letters, cut: int, gammas: Sequence[Letters], q: int, variant: str) -> bool:
    """No forbidden occurrence ends inside w[cut:]."""
    if variant == TSENG:
        return not any(_matches(g, w[max(0, cut - len(g) + 1):]) for g in gammas)
    return w[cut - 1:cut + q] not in gammas


def geometric_member(p: MarkovPartition, alpha, gammas, q: int, variant: str) -> bool:
    """
    R_α ∈ E_k decided from exact images: T^n(R_α) must miss Int R_γ for
    every allowed n (all n for tseng, multiples of q for urbanski).
    """
    a = Word.of(alpha).letters
    c = cylinder(p, a)
    lo, hi = c.lo, c.hi
    targets = [cylinder(p, g) for g in word_list(gammas)]
    for n in range(len(a)):
        if variant == TSENG or n % q == 0:
            for t in targets:
                if len(a) - n >= len(t.word) and min(hi, t.hi) > max(lo, t.lo):
                    return False
        if n + 1 < len(a):
            lo, hi = p.map_interval(lo, hi)
    return True


# ----------------------------------------------------------------------------
# Builders
# ----------------------------------------------------------------------------
def _check_inputs(p: MarkovPartition, gammas, q: int, k_max: int, variant: str, first_letter):
    gs = tuple(word_list(gammas))
    if variant not in VARIANTS:
        raise InputError(f"unknown variant {variant!r}")
    if q < 1 or k_max < 1:
        raise InputError("need q >= 1 and k_max >= 1")
    if not gs:
        raise InputError("at least one target word is required")
    for g in gs:
        if len(g) != q + 1:
            raise InputError(f"target {Word(g)} is not a {q}-string")
        p.ts.check_letters(g)
    if first_letter is not None:
        p.ts.check_letters([first_letter])
    return gs


def _explicit_children(p, parent: Letters, gs, q, variant) -> list[Letters]:
    out = []
    for w in iter_words(p.ts, len(parent) - 1 + q, parent):
        if _new_ok(w, len(parent), gs, q, variant):
            out.append(w)
    return out


def _build_explicit(tc: TreeLikeCollection) -> None:
    p, gs, q, variant = tc.p, tc.gammas, tc.q, tc.variant
    first = [w for w in iter_words(p.ts, q)
             if (tc.first_letter is None or w[0] == tc.first_letter) and _avoids(w, gs, q, variant)]
    levels = [first]
    workers = int(getattr(settings, "SYMDYN_WORKERS", 4))
    for k in range(2, tc.k_max + 1):
        parents = levels[-1]
        if not parents:
            levels.append([])
            continue
        with ThreadPoolExecutor(max_workers=max(1, min(workers, len(parents)))) as ex:
            chunks = list(ex.map(lambda a: _explicit_children(p, a, gs, q, variant), parents))
        levels.append([w for chunk in chunks for w in chunk])
        if len(levels[-1]) > EXPLICIT_LIMIT:
            raise InputError(f"level {k} has {len(levels[-1])} words; build compressed instead")
    tc.levels = levels
    tc.counts = [len(lv) for lv in levels]
    tc.diams = [max((cylinder(p, w).measure for w in lv), default=Fraction(0)) for lv in levels]


def _advance(auto: AvoidanceAutomaton, p: MarkovPartition, start: dict[State, StateInfo], q: int,
             reset: bool) -> dict[State, StateInfo]:
    # state -> [count, max measure, parent witness, suffix]; first witness seen is kept
    cur: dict[State, list] = {}
    for (node, last), info in start.items():
        st = (auto.delta[0][last], last) if reset else (node, last)
        _merge(cur, st, info.count, info.max_measure, info.witness, ())
    for _ in range(q):
        nxt: dict[State, list] = {}
        for st, (count, meas, wit, suf) in cur.items():
            for x, v in auto.successors(st):
                _merge(nxt, v, count, meas * p.weight(st[1], x), wit, suf + (x,))
        cur = nxt
    return {st: StateInfo(c, m, w + s) for st, (c, m, w, s) in cur.items()}


def _merge(table: dict, st: State, count: int, meas: Fraction, wit: Letters, suf: Letters) -> None:
    entry = table.get(st)
    if entry is None:
        table[st] = [count, meas, wit, suf]
    else:
        entry[0] += count
        entry[1] = max(entry[1], meas)


def _build_compressed(tc: TreeLikeCollection) -> None:
    p, q = tc.p, tc.q
    auto = tc.automaton
    base: dict[State, StateInfo] = {}
    for x, st in auto.initial():
        if tc.first_letter is None or x == tc.first_letter:
            base[st] = StateInfo(1, p.measure(x), (x,))
    profiles = [_advance(auto, p, base, q, reset=False)]
    for _ in range(2, tc.k_max + 1):
        profiles.append(_advance(auto, p, profiles[-1], q, reset=tc.variant == URBANSKI))
    tc.profiles = profiles
    tc.counts = [sum(i.count for i in prof.values()) for prof in profiles]
    tc.diams = [max((i.max_measure for i in prof.values()), default=Fraction(0)) for prof in profiles]


def build_levels(
    p: MarkovPartition,
    gammas,
    q: int,
    k_max: int,
    variant: str = TSENG,
    first_letter: int | None = None,
    explicit: bool | None = None,
) -> TreeLikeCollection:
    gs = _check_inputs(p, gammas, q, k_max, variant, first_letter)
    tc = TreeLikeCollection(p, gs, q, k_max, variant, first_letter)
    tc.automaton = AvoidanceAutomaton.build(p.ts, gs)
    if explicit is None:
        explicit = p.size ** (k_max * q + 1) <= EXPLICIT_LIMIT
    if explicit:
        _build_explicit(tc)
    else:
        _build_compressed(tc)
    for k, c in enumerate(tc.counts, start=1):
        if c == 0:
            tc.death_level = k
            log.warning("treelike: collection dies at level %s (%s, q=%s)", k, variant, q)
            break
    last = tc.death_level - 1 if tc.death_level else tc.k_max
    tc.deltas = [density_and_delta(tc, k).delta for k in range(1, min(last, tc.k_max - 1) + 1)]
    log.info("treelike: %s %s levels, counts %s", k_max, "explicit" if explicit else "compressed", tc.counts[:6])
    return tc


# ----------------------------------------------------------------------------
# Densities and bounds
# ----------------------------------------------------------------------------
def _state_density(tc: TreeLikeCollection, st: State) -> Fraction:
    """Share of a level element that survives to the next level; depends on the state only."""
    auto, p = tc.automaton, tc.p
    node, last = st
    if tc.variant == URBANSKI:
        node = auto.delta[0][last]
    key = (node, last)
    if key in tc.density_cache:
        return tc.density_cache[key]
    mass = {key: Fraction(1)}
    for _ in range(tc.q):
        nxt: dict[State, Fraction] = {}
        for u, m in mass.items():
            for x, v in auto.successors(u):
                nxt[v] = nxt.get(v, Fraction(0)) + m * p.weight(u[1], x)
        mass = nxt
    tc.density_cache[key] = sum(mass.values(), Fraction(0))
    return tc.density_cache[key]


def element_density(tc: TreeLikeCollection, alpha) -> Fraction:
    """density(E_{k+1}, R_α) for one level element α."""
    a = Word.of(alpha).letters
    if (len(a) - 1) % tc.q or not tc.contains((len(a) - 1) // tc.q, a):
        raise InputError(f"{Word(a)} is not an element of the collection")
    if tc.variant == URBANSKI:
        return _state_density(tc, (0, a[-1]))
    return _state_density(tc, tc.automaton.feed(a))


def density_and_delta(tc: TreeLikeCollection, k: int) -> DensityReport:
    if not 1 <= k < tc.k_max:
        raise InputError(f"densities need levels {k} and {k + 1} (built up to {tc.k_max})")
    if tc.counts[k - 1] == 0 or tc.counts[k] == 0:
        raise CollectionDeathError(k if tc.counts[k - 1] == 0 else k + 1,
                                   "the collection is empty; Δ is undefined")
    if tc.levels is not None:
        return _explicit_density(tc, k)
    dens: dict[str, Fraction] = {}
    best: Fraction | None = None
    witnesses: list[Word] = []
    for st, info in sorted(tc.profiles[k - 1].items(), key=lambda kv: kv[1].witness):
        d = _state_density(tc, st)
        dens[f"state{st}"] = d
        if best is None or d < best:
            best, witnesses = d, [Word(info.witness)]
        elif d == best:
            witnesses.append(Word(info.witness))
    return DensityReport(k, dens, best, witnesses)


def _explicit_density(tc: TreeLikeCollection, k: int) -> DensityReport:
    children: dict[Letters, Fraction] = {}
    for w in tc.levels[k]:
        parent = w[:k * tc.q + 1]
        children[parent] = children.get(parent, Fraction(0)) + cylinder(tc.p, w).measure
    dens: dict[str, Fraction] = {}
    for a in tc.levels[k - 1]:
        dens[Word(a).format(tc.p.size)] = children.get(a, Fraction(0)) / cylinder(tc.p, a).measure
    best = min(dens.values())
    witnesses = [Word(a) for a in tc.levels[k - 1] if dens[Word(a).format(tc.p.size)] == best]
    return DensityReport(k, dens, best, witnesses)


def hd_lower_bound(tc: TreeLikeCollection, k: int, density_floor: Fraction | None = None) -> Fraction:
    """
    dim M − (Σ_{j=1}^{k} log Δ_j)/(log d_k), rounded down.

    With ``density_floor`` every Δ_j is first checked against the floor
    and the floor is used in its place.
    """
    if not 1 <= k <= len(tc.deltas):
        if tc.death_level is not None:
            raise CollectionDeathError(tc.death_level, "the collection died before level k")
        raise InputError(f"Δ_1..Δ_{k} are not available (k_max = {tc.k_max})")
    deltas = tc.deltas[:k]
    for j, d in enumerate(deltas, start=1):
        if d == 0:
            raise CollectionDeathError(j, f"Δ_{j} = 0")
        if density_floor is not None and d < density_floor:
            raise InputError(f"Δ_{j} = {d} is below the density floor {density_floor}")
    if density_floor is not None:
        deltas = [Fraction(density_floor)] * k
    dk = tc.diams[k - 1]
    if not 0 < dk < 1:
        raise InputError(f"d_{k} = {dk} must lie strictly between 0 and 1")
    num = certified.total(certified.log_enclosure(1 / d) for d in deltas)
    den = certified.log_enclosure(1 / dk)
    lo, _ = certified.subtract_from(tc.dim_M, certified.divide(num, den))
    return certified.to_fraction(lo)


def closed_form_bound(variant: str, p: MarkovPartition, q: int, P: int = 1) -> float:
    """
    Limit predicted by the density floors: 1 − log 2/(q log λ) for
    ``urbanski``, 1 + log(ε(2sP)/C)/(q log λ) for ``corrected``.
    """
    lam = math.log(p.lam)
    if variant == URBANSKI:
        return 1 - math.log(2) / (q * lam)
    if variant == "corrected":
        eps = distortion(p).eps(2 * p.size * P) / p.C
        return 1 + math.log(eps) / (q * lam)
    raise InputError(f"no closed form for variant {variant!r}")


def corrected_density_floor(p: MarkovPartition, P: int = 1) -> Fraction:
    return distortion(p).eps(2 * p.size * P) / p.C


def certify_corrected_density(tc: TreeLikeCollection, k: int, sample: int | None = None) -> list[dict]:
    """
    For each element R_α of level k (the first ``sample`` of them if given),
    the serial extension v with R_{αv} ⊆ ∪E_{k+1}; returns the elements where
    the guarantee fails. Compressed builds are checked on one witness per
    automaton state.
    """
    if not 1 <= k < tc.k_max:
        raise InputError(f"level {k} needs a built level {k + 1} (built up to {tc.k_max})")
    floor = corrected_density_floor(tc.p, len(tc.gammas))
    failures = []
    if tc.levels is not None:
        words = tc.level_words(k)
    else:
        words = [Word(i.witness) for _, i in sorted(tc.profiles[k - 1].items())]
    for w in words if sample is None else words[:sample]:
        ext = serial_extend(tc.p.ts, tc.gammas, w).extension
        ratio = cylinder(tc.p, w + ext).measure / cylinder(tc.p, w).measure
        inside = len((w + ext).letters) <= (k + 1) * tc.q + 1 and all(
            tc.contains(k + 1, c)
            for c in iter_words(tc.p.ts, (k + 1) * tc.q, (w + ext).letters)
        )
        if ratio < floor or not inside:
            failures.append({"word": str(w), "extension": str(ext), "ratio": ratio, "inside": inside})
    return failures


def structure_report(tc: TreeLikeCollection) -> dict:
    """Finite-prefix checks of nesting and shrinking diameters."""
    p = tc.p
    out = {"decreasing": True, "below_expansion": True, "nested": True}
    alive = [d for d, c in zip(tc.diams, tc.counts) if c]
    out["decreasing"] = all(a > b for a, b in zip(alive, alive[1:]))
    for k, d in enumerate(alive, start=1):
        limit = p.delta_T / p.lam ** (k * tc.q)
        if d > limit or (d == limit and not p.endpoint_tolerant):
            out["below_expansion"] = False
    if tc.levels is not None:
        for k in range(1, len(tc.levels)):
            prev = set(tc.levels[k - 1])
            if any(w[:k * tc.q + 1] not in prev for w in tc.levels[k]):
                out["nested"] = False
    return out


def certify_avoidance(tc: TreeLikeCollection, p: MarkovPartition, gammas=None,
                      horizon: int | None = None, stride: int = 1) -> bool:
    """Exact midpoint orbits of the deepest level never enter Int R_γ."""
    gs = word_list(gammas) if gammas is not None else list(tc.gammas)
    deepest = tc.k_max
    if tc.counts[deepest - 1] == 0:
        log.warning("treelike: deepest level is empty; avoidance holds vacuously")
        return True
    horizon = (tc.k_max - 1) * tc.q if horizon is None else horizon
    targets = [cylinder(p, g) for g in gs]
    if tc.levels is not None:
        samples = [cylinder(p, w).midpoint for w in tc.levels[deepest - 1]]
    else:
        samples = [cylinder(p, i.witness).midpoint for i in tc.profiles[deepest - 1].values()]
    for x in samples:
        y = x
        for n in range(horizon + 1):
            if n % stride == 0 and any(t.interior_contains(y) for t in targets):
                log.info("treelike: orbit of %s enters a target interior at step %s", x, n)
                return False
            y = p.T(y)
    return True
