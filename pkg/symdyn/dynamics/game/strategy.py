# symdyn/dynamics/game/strategy.py
"""
Both players of the (m, n) Schmidt game on the circle.

White's strategy runs in phases:

    filler    concentric shrink while d(B) is not below the smallest element
    fit-eta   from turn J on: W inside the longer half of B next to the
              lowest-weight boundary point, until the ball has shrunk past
              the generation-2P boundary and Q can be chosen
    descent   every turn: W inside R_{u b}, where u is a cylinder inside B
              holding no copy of any target and b is a safe extension of u

The descent keeps the invariant that the current certificate word never
contains a target truncation, so the final ball's orbit avoids the target
cylinders.
"""
from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from ..circle import (
    CylinderSet,
    MarkovPartition,
    _fmt,
    distortion,
    fit_interval,
    frac,
    representations_of,
)
from ..errors import DefectError, InputError, StrategyFailure
from ..matching import (
    detect_exceptional,
    find_matches,
    separation_violation,
    serial_extend,
    shortest_safe_extension,
)
from ..sft import TransitionSystem, Word
from .balls import Ball, ball_in_interval, clamp_toward, legal_centers

log = logging.getLogger(__name__)

BLACK_STRATEGIES = ("random", "hug-target", "adversarial-replay")
TARGET_MODES = ("all", "single")
PHASES = ("filler", "fit-eta", "descent")

CANDIDATE_DEPTH: int = 3
RANDOM_GRID: int = 2 ** 20


# ----------------------------------------------------------------------------
# Parameters
# ----------------------------------------------------------------------------
@dataclass(frozen=True)
class GameParams:
    partition: MarkovPartition
    x0: Fraction
    black_ratio: Fraction
    white_ratio: Fraction
    black_strategy: str = "random"
    seed: int = 7
    initial_radius: Fraction = Fraction(1, 4)
    targets_mode: str = "all"
    recorded: tuple[Fraction, ...] = ()
    jitter: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("x0", "black_ratio", "white_ratio", "initial_radius", "jitter"):
            object.__setattr__(self, name, frac(getattr(self, name)))
        object.__setattr__(self, "x0", self.x0 % 1)
        object.__setattr__(self, "recorded", tuple(frac(c) for c in self.recorded))
        if not 0 < self.black_ratio < 1:
            raise InputError(f"black ratio {self.black_ratio} must lie in (0, 1)")
        if not 0 < self.white_ratio < 1:
            raise InputError(f"white ratio {self.white_ratio} must lie in (0, 1)")
        if not 0 < self.initial_radius < Fraction(1, 2):
            raise InputError("initial radius must lie in (0, 1/2)")
        if self.black_strategy not in BLACK_STRATEGIES:
            raise InputError(f"unknown black strategy {self.black_strategy!r}")
        if self.targets_mode not in TARGET_MODES:
            raise InputError(f"unknown targets mode {self.targets_mode!r}")

    def to_json(self) -> dict:
        out = {
            "partition": self.partition.to_json(),
            "x0": _fmt(self.x0),
            "black_ratio": _fmt(self.black_ratio),
            "white_ratio": _fmt(self.white_ratio),
            "black_strategy": self.black_strategy,
            "seed": self.seed,
            "initial_radius": _fmt(self.initial_radius),
            "targets_mode": self.targets_mode,
        }
        if self.recorded:
            out["recorded"] = [_fmt(c) for c in self.recorded]
            out["jitter"] = _fmt(self.jitter)
        return out


# ----------------------------------------------------------------------------
# Constants of the strategy
# ----------------------------------------------------------------------------
def winning_ratio(p: MarkovPartition) -> Fraction:
    """ε(7s+2)/(2C); ε(5)/(2C) when no letter is degenerate."""
    prof = distortion(p)
    q = 7 * p.size + 2 if p.has_degenerate else 5
    return prof.eps(q) / (2 * p.C)


def winning_ratio_for(partitions: Sequence[MarkovPartition]) -> Fraction:
    if not partitions:
        raise InputError("need at least one partition")
    return min(winning_ratio(p) for p in partitions)


def least_P(p: MarkovPartition, cap: int = 100_000) -> int:
    """Least P >= 4s-2 with 4C⁴δλ^-P / (ε(1)ε(2s)ε(7s+2) r d_max) < r ε(1) / 2C²."""
    s, C = p.size, p.C
    prof = distortion(p)
    e1 = prof.eps(1)
    denom = e1 * prof.eps(2 * s) * prof.eps(7 * s + 2) * p.r * p.max_diameter
    rhs = p.r * e1 / (2 * C ** 2)
    base = 4 * C ** 4 * p.delta_T / denom
    P = 4 * s - 2
    shrink = p.lam ** P
    while base / shrink >= rhs:
        P += 1
        shrink *= p.lam
        if P > cap:
            raise DefectError("no admissible P below the search cap")
    return P


def least_L0(p: MarkovPartition) -> int:
    """Least L with s^(-1/L) >= λ^(-1/2), i.e. s² <= λ^L."""
    s2 = Fraction(p.size) ** 2
    L, power = 1, p.lam
    while power < s2:
        L += 1
        power *= p.lam
    return L


def window_Q(p: MarkovPartition, m: Fraction, n: Fraction, cap: int = 100_000) -> int:
    """Least Q with 𝓔(Q+1) < ε(1)·m·n / 2C²; below it a descent step may outrun Q."""
    prof = distortion(p)
    bound = prof.eps(1) * m * n / (2 * p.C ** 2)
    Q = 1
    while prof.Eps(Q + 1) >= bound:
        Q += 1
        if Q > cap:
            raise DefectError("no admissible Q below the search cap")
    return Q


def q_ladder(ts: TransitionSystem, letters: Sequence[int], N: int) -> tuple[int, int, int, int]:
    """
    Offsets N₁ < N₂ < N₃ < N₄ from N: N + N₁ is the first nondegenerate index
    after N + s, each following one the next nondegenerate index.
    """
    out = []
    j = N + ts.size
    for _ in range(4):
        j += 1
        while ts.is_degenerate(letters[j]):
            j += 1
        out.append(j - N)
    return tuple(out)


# ----------------------------------------------------------------------------
# Black
# ----------------------------------------------------------------------------
class BlackPlayer:
    def __init__(self, params: GameParams):
        self.params = params
        self.rng = random.Random(params.seed)
        self.turn = 0

    def _uniform(self) -> Fraction:
        return Fraction(self.rng.randrange(RANDOM_GRID + 1), RANDOM_GRID)

    def _replayed(self) -> Fraction | None:
        rec = self.params.recorded
        if self.turn >= len(rec):
            return None
        c = rec[self.turn]
        if self.params.jitter:
            c += self.params.jitter * (self._uniform() - Fraction(1, 2))
        return c

    def first(self) -> Ball:
        r = self.params.initial_radius
        kind = self.params.black_strategy
        if kind == "hug-target":
            center = self.params.x0
        elif kind == "adversarial-replay":
            center = self._replayed()
            center = self._uniform() if center is None else center
        else:
            center = self._uniform()
        self.turn += 1
        return Ball(center, r)

    def move(self, W: Ball) -> Ball:
        radius = self.params.black_ratio * W.radius
        kind = self.params.black_strategy
        if kind == "hug-target":
            B = clamp_toward(W, radius, self.params.x0)
        elif kind == "adversarial-replay":
            c = self._replayed()
            B = clamp_toward(W, radius, W.center if c is None else c)
        else:
            a, b = legal_centers(W, radius)
            B = Ball(a + self._uniform() * (b - a), radius)
        self.turn += 1
        return B


# ----------------------------------------------------------------------------
# White
# ----------------------------------------------------------------------------
@dataclass
class StrategyState:
    phase: str = "filler"
    J: int | None = None
    N0: int | None = None
    eta: Word | None = None
    L0: int = 0
    L1: int | None = None
    L: int | None = None
    P: int = 0
    Q: int | None = None
    targets: tuple[Word, ...] = ()
    u: CylinderSet | None = None
    v: CylinderSet | None = None
    last_extension: int = 0
    q_history: list[int] = field(default_factory=list)
    q_window_ok: bool = True
    sources: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class WhiteMove:
    ball: Ball
    phase: str
    word: Word | None = None
    info: dict = field(default_factory=dict)


class WhiteStrategy:
    def __init__(self, params: GameParams):
        self.params = params
        self.p = params.partition
        self.n = params.white_ratio
        self.state = StrategyState(P=least_P(self.p), L0=least_L0(self.p))
        self.q_window = window_Q(self.p, params.black_ratio, params.white_ratio)
        self.q_floor = max(8 * self.p.size - 4, 2 * self.state.P + 1, self.q_window)
        log.debug("game: P=%s L0=%s Q window=%s", self.state.P, self.state.L0, self.q_window)

    # -- geometry helpers -------------------------------------------------
    def _meeting(self, B: Ball, roots: list[CylinderSet], g_hi: int) -> Iterator:
        level = roots
        while level and level[0].generation <= g_hi:
            yield level
            nxt = []
            for c in level:
                for j in self.p.ts.successors[c.word[-1]]:
                    child = self.p.refine(c, j)
                    if B.overlap(*child.interval) > 0:
                        nxt.append(child)
            level = nxt

    def _roots(self, B: Ball) -> list[CylinderSet]:
        if self.state.v is not None:
            return [self.state.v]
        return [self.p.base(i) for i in self.p.ts.letters if B.overlap(*self.p.element(i)) > 0]

    def _inside_one(self, B: Ball, gen: int) -> bool:
        roots = [self.p.base(i) for i in self.p.ts.letters if B.overlap(*self.p.element(i)) > 0]
        last = roots
        for level in self._meeting(B, roots, gen):
            last = level
            if len(level) > 1:
                return False
        return len(last) == 1 and last[0].generation == gen and B.inside(*last[0].interval)

    def _concentric(self, B: Ball) -> Ball:
        return B.shrink(self.n)

    # -- phases -----------------------------------------------------------
    def move(self, turn: int, B: Ball) -> WhiteMove:
        st = self.state
        if st.phase == "descent":
            return self._descend(turn, B, fit_interval(self.p, B.arc, within=st.v), first=False)
        if B.diameter >= self.p.min_diameter:
            return WhiteMove(self._concentric(B), "filler")

        fit = fit_interval(self.p, B.arc)
        if st.J is None:
            st.J, st.N0, st.eta = turn, fit.N, fit.eta.word
            log.info("game: turn %s reaches J (N0=%s, eta=%s)", turn, fit.N, fit.eta.word)
        st.phase = "fit-eta"
        since = turn - st.J
        if st.L1 is None and self._inside_one(B, 2 * st.P):
            st.L1 = since
        if since >= st.L0 and st.L1 is not None:
            plan = self._choose_Q(fit.N)
            if plan is not None:
                st.Q, st.targets = plan
                st.L = max(st.L0, st.L1)
                st.phase = "descent"
                log.info("game: descent starts at turn %s with Q=%s and %s target(s)",
                         turn, st.Q, len(st.targets))
                return self._descend(turn, B, fit, first=True)
        return self._expand(B, fit)

    def _expand(self, B: Ball, fit) -> WhiteMove:
        radius = self.n * B.radius
        H = fit.half
        if H is not None and 2 * radius <= H[1] - H[0]:
            W = ball_in_interval(H[0], H[1], radius)
            if B.contains_ball(W):
                return WhiteMove(W, "fit-eta", info={"N": fit.N, "case": fit.case})
        return WhiteMove(self._concentric(B), "fit-eta", info={"N": fit.N, "case": fit.case})

    def _choose_Q(self, N: int) -> tuple[int, tuple[Word, ...]] | None:
        p, ts = self.p, self.p.ts
        s = p.size
        if not p.has_degenerate:
            Q = N + 1
        else:
            rep = representations_of(p, self.params.x0, 0)
            letters = list(itertools.islice(rep.letters(0, p), N + 6 * s + 8))
            N1, _, _, N4 = q_ladder(ts, letters, N)
            Q = N + N4 + 1
            if detect_exceptional(ts, letters[:Q + 1]).is_exceptional:
                Q = N + N1 + 1
        if Q < self.q_floor:
            return None
        words = representations_of(p, self.params.x0, Q).words
        if self.params.targets_mode == "single":
            words = words[:1]
        if Q < 2 * s * len(words) + 1:
            return None
        for g in words:
            try:
                if detect_exceptional(ts, g).is_exceptional:
                    log.debug("game: target %s is exceptional at Q=%s", g, Q)
                    return None
            except InputError as exc:
                log.debug("game: target %s rejected at Q=%s (%s)", g, Q, exc)
                return None
        for x, y in itertools.permutations(range(len(words)), 2):
            if separation_violation(words[x].letters, words[y].letters, s) is not None:
                log.debug("game: targets not separated at Q=%s", Q)
                return None
        return Q, tuple(words)

    def _candidates(self, B: Ball, g_lo: int, preferred: CylinderSet | None) -> list[CylinderSet]:
        out = []
        for level in self._meeting(B, self._roots(B), g_lo + CANDIDATE_DEPTH):
            if level[0].generation >= g_lo:
                out.extend(c for c in level if B.contains_interval(*c.interval))
        out.sort(key=lambda c: (c.generation, -c.measure, B.offset_of(c.lo)))
        if preferred is not None and preferred in out:
            out.remove(preferred)
            out.insert(0, preferred)
        return out

    def _extend_cylinder(self, c: CylinderSet, ext: Word) -> CylinderSet:
        for j in ext:
            c = self.p.refine(c, j)
        return c

    def _descend(self, turn: int, B: Ball, fit, first: bool) -> WhiteMove:
        st = self.state
        need = self.n * B.diameter
        g_lo = max(fit.N, st.Q) if first else fit.N
        tried = 0
        for c in self._candidates(B, g_lo, None if first else fit.eta_i):
            if any(find_matches(g, c.word) for g in st.targets):
                continue
            tried += 1
            serial = serial_extend(self.p.ts, st.targets, c.word).extension
            v = self._extend_cylinder(c, serial)
            source = "serial"
            if v.measure < need and len(serial) > 0:
                short = shortest_safe_extension(self.p.ts, st.targets, c.word, len(serial) - 1)
                if short is None:
                    continue
                v, source = self._extend_cylinder(c, short), "shortest"
            if v.measure < need:
                continue
            return self._accept(turn, B, c, v, source, fit)
        raise StrategyFailure(turn, f"no descent cylinder of generation >= {g_lo} fits "
                                    f"(tried {tried}, need {need})")

    def _accept(self, turn: int, B: Ball, u: CylinderSet, v: CylinderSet, source: str, fit) -> WhiteMove:
        st = self.state
        info = {"N": fit.N, "case": fit.case, "Q": st.Q, "extension": source,
                "extension_length": len(v.word) - len(u.word)}
        if st.u is not None:
            q = u.generation - st.u.generation
            st.q_history.append(q)
            ok = st.last_extension < q <= st.Q
            if not ok:
                log.warning("game: turn %s step q=%s leaves the window (%s, %s]",
                            turn, q, st.last_extension, st.Q)
            st.q_window_ok = st.q_window_ok and ok
            info["q"] = q
        st.u, st.v = u, v
        st.last_extension = len(v.word) - len(u.word)
        st.sources[source] = st.sources.get(source, 0) + 1
        W = ball_in_interval(v.lo, v.hi, self.n * B.radius)
        if not (B.contains_ball(W) and v.lo <= W.lo and W.hi <= v.hi):
            raise DefectError(f"turn {turn}: descent ball escapes its cylinder")
        return WhiteMove(W, "descent", v.word, info)
