# symdyn/dynamics/matching.py
"""
Matches, partial matches and the constructive no-matching extension.

A *match* of γ with α is an occurrence of γ inside α; a *partial match* is a
suffix of α equal to a proper prefix of γ (a live threat at the right edge).
``no_matching_extend`` appends two short pieces b⁰b¹ to α so that no valid
continuation of α can ever complete γ with its head inside α.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .errors import DefectError, InputError
from .sft import (
    DOUBLE_GENERAL_BLOCK,
    GENERAL_BLOCK,
    TransitionSystem,
    Word,
    as_tuple,
    forced_run,
    is_double_general_block,
    is_general_block,
    is_valid_word,
    iter_words,
    word_list,
)

log = logging.getLogger(__name__)

Letters = tuple[int, ...]


# ----------------------------------------------------------------------------
# Types
# ----------------------------------------------------------------------------
@dataclass(frozen=True)
class PartialMatch:
    head: int
    matched_length: int


@dataclass(frozen=True)
class ExceptionalForm:
    is_exceptional: bool
    repeated_block: Word | None = None
    tail_kind: tuple[str, ...] = ()
    repeats: int = 0


@dataclass(frozen=True)
class ExtensionPair:
    b0: Word
    b1: Word
    case: str
    deflected: int = 0      # letters spent before every partial match was dead

    @property
    def word(self) -> Word:
        return self.b0 + self.b1

    def __len__(self) -> int:
        return len(self.b0) + len(self.b1)


@dataclass(frozen=True)
class SerialExtension:
    extension: Word
    pieces: tuple[tuple[int, ExtensionPair], ...] = ()
    heads: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.extension)


@dataclass
class OracleReport:
    passed: bool
    checked_to: int
    counterexample: Word | None = None
    gamma: Word | None = None
    method: str = "automaton"
    continuations: int = 0
    notes: list[str] = field(default_factory=list)


# ----------------------------------------------------------------------------
# Detection
# ----------------------------------------------------------------------------
def _matches(g: Letters, a: Letters) -> list[int]:
    n1 = len(g)
    if not g:
        return list(range(len(a) + 1))
    first = g[0]
    return [
        i for i in range(len(a) - n1 + 1)
        if a[i] == first and a[i:i + n1] == g
    ]


def _partials(g: Letters, a: Letters) -> list[PartialMatch]:
    n, N = len(g) - 1, len(a) - 1
    out = []
    for i in range(max(0, N - n + 1), N + 1):
        m = N - i + 1
        if a[i:] == g[:m]:
            out.append(PartialMatch(i, m))
    return out


def find_matches(gamma, alpha) -> list[int]:
    g, a = as_tuple(gamma), as_tuple(alpha)
    offset = alpha.start if isinstance(alpha, Word) else 0
    return [offset + i for i in _matches(g, a)]


def find_partial_matches(gamma, alpha) -> list[PartialMatch]:
    g, a = as_tuple(gamma), as_tuple(alpha)
    offset = alpha.start if isinstance(alpha, Word) else 0
    return [PartialMatch(offset + p.head, p.matched_length) for p in _partials(g, a)]


def _equivalent(x: Letters, y: Letters) -> bool:
    k = min(len(x), len(y))
    return x[:k] == y[:k]


def _check_gamma(ts: TransitionSystem, g: Letters) -> None:
    s = ts.size
    if not is_valid_word(ts, g):
        raise InputError(f"gamma {Word(g)} is not a valid string")
    n = len(g) - 1
    if n < 8 * s - 4:
        raise InputError(f"gamma must be an n-string with n >= 8s-4 = {8 * s - 4}, got n = {n}")
    if ts.is_degenerate(g[n - 1]):
        raise InputError(f"gamma letter {n - 1} must be nondegenerate")


def detect_exceptional(ts: TransitionSystem, gamma) -> ExceptionalForm:
    g = as_tuple(gamma)
    _check_gamma(ts, g)
    s = ts.size
    found: ExceptionalForm | None = None
    kinds: set[str] = set()
    for L in range(1, 2 * s):
        a = g[:L]
        if len(a) < L or not is_general_block(ts, a):
            continue
        k = 0
        while g[k * L:(k + 1) * L] == a:
            k += 1
        aa = a + a
        for j in range(1, k + 1):
            tail = g[j * L:]
            if not tail or _equivalent(tail, aa):
                continue
            here = []
            if is_general_block(ts, tail):
                here.append(GENERAL_BLOCK)
            if is_double_general_block(ts, tail):
                here.append(DOUBLE_GENERAL_BLOCK)
            if here:
                kinds.update(here)
                if found is None:
                    found = ExceptionalForm(True, Word(a), (), j)
    if found is None:
        return ExceptionalForm(False)
    log.debug("matching: %s is exceptional (block %s, %s)", Word(g), found.repeated_block, sorted(kinds))
    return ExceptionalForm(True, found.repeated_block, tuple(sorted(kinds)), found.repeats)


# ----------------------------------------------------------------------------
# Certification
# ----------------------------------------------------------------------------
def extension_is_safe(gamma, alpha, tail) -> bool:
    """
    True iff no continuation of ``alpha + tail`` of total appended length at
    most n can hold a match of γ whose head lies in ``alpha``.

    Any head inside alpha that is still compatible with γ at the end of the
    word can be completed by copying γ, so compatibility is the whole test.
    """
    g, a, t = as_tuple(gamma), as_tuple(alpha), as_tuple(tail)
    w = a + t
    n, N = len(g) - 1, len(a) - 1
    if len(t) > n:
        return False
    for i in range(max(0, N - n), N + 1):
        window = w[i:i + n + 1]
        if window == g[:len(window)]:
            return False
    return not _matches(g, a)


def continuation_oracle(
    ts: TransitionSystem,
    gammas,
    alpha,
    tail=(),
    horizon: int | None = None,
    method: str = "automaton",
) -> OracleReport:
    """
    Checks every valid continuation β with l(tail) + l(β) <= horizon (default n)
    for a match of any γ anywhere in α·tail·β.

    ``method="enumerate"`` walks every β literally; ``"automaton"`` searches the
    avoidance automaton breadth first. Matches in a shorter word persist in
    every longer one, so only the longest continuations are examined.
    """
    from .oracle import AvoidanceAutomaton

    gs = word_list(gammas)
    a, t = as_tuple(alpha), as_tuple(tail)
    n = max(len(g) for g in gs) - 1
    horizon = n if horizon is None else horizon
    free = max(0, horizon - len(t))
    base = a + t

    if method == "enumerate":
        count = 0
        for cont in _continuations(ts, base[-1], free):
            count += 1
            w = base + cont
            for g in gs:
                hits = _matches(g, w)
                if hits:
                    end = hits[0] + len(g)
                    shortest = w[len(base):max(len(base), end)]
                    return OracleReport(False, horizon, Word(shortest), Word(g), method, count)
        return OracleReport(True, horizon, None, None, method, count)

    auto = AvoidanceAutomaton.build(ts, gs)
    state = auto.feed(base)
    if state is None:
        return OracleReport(False, horizon, Word(()), None, method)
    witness = auto.shortest_death(state, free)
    if witness is None:
        return OracleReport(True, horizon, None, None, method)
    w = base + witness
    culprit = next((g for g in gs if _matches(g, w)), None)
    return OracleReport(False, horizon, Word(witness), Word(culprit) if culprit else None, method)


def _continuations(ts: TransitionSystem, last: int, length: int) -> Iterator[Letters]:
    if length <= 0:
        yield ()
        return
    for w in iter_words(ts, length, (last,)):
        yield w[1:]


# ----------------------------------------------------------------------------
# No-matching extension
# ----------------------------------------------------------------------------
def _alive(g: Letters, w: Letters, heads: Sequence[int]) -> list[int]:
    out = []
    for h in heads:
        seg = w[h:]
        if len(seg) < len(g) and seg == g[:len(seg)]:
            out.append(h)
    return out


def _free(ts: TransitionSystem, w: Letters) -> Letters:
    return (ts.successors[w[-1]][0],)


def _ranked(ts: TransitionSystem, g: Letters, w: Letters, live: Sequence[int], avoid: int | None) -> list[int]:
    """
    Successors of ``w`` in the order they are tried: letters no live head
    wants, then letters other than ``avoid``, then by survivor count.
    Letters that would complete γ are dropped.
    """
    n = len(g) - 1
    ranked = []
    for x in ts.successors[w[-1]]:
        keep = [h for h in live if g[len(w) - h] == x]
        if any(len(w) - h == n for h in keep):
            continue
        ranked.append((bool(keep), x == avoid, len(keep), x))
    return [x for *_, x in sorted(ranked)]


class _Deflector:
    """
    Appends letters to α until every partial match is dead.

    ``rule(w)`` names the letter the case analysis wants to avoid at the
    first choice point (the period letter in 3A, γ^i's next letter in 3B).
    Forced letters pass through unchanged; failed states are remembered by
    their live lengths so that short partial matches are only examined once.
    """

    def __init__(self, ts: TransitionSystem, g: Letters, rule=None):
        self.ts, self.g, self.rule = ts, g, rule
        self.dead_ends: set[tuple] = set()

    def run(self, w: Letters, live: list[int], budget: int, first: bool = True) -> Letters | None:
        if not live:
            return ()
        if budget == 0:
            return None
        key = (tuple(len(w) - h for h in live), w[-1], budget, first)
        if key in self.dead_ends:
            return None
        choice = len(self.ts.successors[w[-1]]) > 1
        avoid = self.rule(w, live) if (first and choice and self.rule) else None
        for x in _ranked(self.ts, self.g, w, live, avoid):
            nxt = w + (x,)
            rest = self.run(nxt, _alive(self.g, nxt, live), budget - 1, first and not choice)
            if rest is not None:
                return (x,) + rest
        self.dead_ends.add(key)
        return None


def _case(ts: TransitionSystem, g: Letters, heads: list[int]):
    """Case label and first-choice rule from the two smallest heads."""
    if not heads:
        return "1", None
    if len(heads) == 1:
        return "2", None
    i, j = heads[0], heads[1]
    period = j - i
    c = g[:period]
    if is_general_block(ts, c):
        # break the repetition of c: every head from j on needs the period letter
        return "3A", lambda w, live: c[(len(w) - i) % period]
    # kill γ^i first; the heads from j on need letters of cc
    return "3B", lambda w, live: g[len(w) - i] if i in live else None


def no_matching_extend(ts: TransitionSystem, gamma, alpha) -> ExtensionPair:
    g, a = as_tuple(gamma), as_tuple(alpha)
    _check_gamma(ts, g)
    if not is_valid_word(ts, a):
        raise InputError(f"alpha {Word(a)} is not a valid string")
    n, N = len(g) - 1, len(a) - 1
    if N < n:
        raise InputError(f"alpha must be at least as long as gamma (N={N} < n={n})")
    if detect_exceptional(ts, g).is_exceptional:
        raise InputError(f"gamma {Word(g)} has an exceptional form")
    if _matches(g, a):
        raise InputError(f"gamma already matches alpha at {_matches(g, a)}")

    s = ts.size
    heads = [p.head for p in _partials(g, a)]
    case, rule = _case(ts, g, heads)
    tail = _Deflector(ts, g, rule).run(a, heads, 2 * s)
    if tail is None:
        raise DefectError(f"case {case} leaves a partial match alive for gamma={Word(g)} alpha={Word(a)}")

    # b⁰ ends at the first choice letter; b¹ carries the rest
    cut = min(len(tail), len(forced_run(ts, a[-1])) + 1)
    if len(tail) - cut > s:
        cut = len(tail) - s
    b0 = tail[:cut] or _free(ts, a)
    b1 = tail[cut:] or _free(ts, a + b0)
    if len(b0) > s or len(b1) > s or not extension_is_safe(g, a, b0 + b1):
        raise DefectError(f"case {case} produced an unsafe pair {Word(b0)}|{Word(b1)} for gamma={Word(g)}")
    log.debug("matching: case %s, heads %s -> b0=%s b1=%s", case, heads, Word(b0), Word(b1))
    return ExtensionPair(Word(b0), Word(b1), case, len(tail))


def non_extendable_witnesses(ts: TransitionSystem, gamma, alpha) -> dict[str, str] | None:
    """
    For every candidate pair (b⁰, b¹) with lengths up to s, a continuation
    that completes a match. None as soon as some pair survives.
    """
    g, a = as_tuple(gamma), as_tuple(alpha)
    s = ts.size
    out: dict[str, str] = {}
    for l0, l1 in itertools.product(range(1, s + 1), repeat=2):
        for b0 in _continuations(ts, a[-1], l0):
            for b1 in _continuations(ts, b0[-1], l1):
                rep = continuation_oracle(ts, [g], a, b0 + b1, horizon=len(g) - 1)
                if rep.passed:
                    return None
                out[f"{Word(b0)}|{Word(b1)}"] = str(rep.counterexample)
    return out


# ----------------------------------------------------------------------------
# Serial extension against several targets
# ----------------------------------------------------------------------------
def separation_violation(g1: Letters, g2: Letters, s: int) -> int | None:
    """Shift t in 0..2s at which the shifted g1 agrees with g2 off its last 2s letters."""
    for t in range(0, 2 * s + 1):
        shifted = g1[t:]
        k = min(len(shifted), len(g2) - 2 * s)
        if k <= 0 or shifted[:k] == g2[:k]:
            return t
    return None


def serial_extend(ts: TransitionSystem, gammas, alpha) -> SerialExtension:
    gs = [as_tuple(g) for g in gammas]
    a = as_tuple(alpha)
    if not gs:
        return SerialExtension(Word(()))
    s, P = ts.size, len(gs)
    if len({len(g) for g in gs}) != 1:
        raise InputError("targets must share one length")
    q = len(gs[0]) - 1
    if q < 2 * s * P + 1:
        raise InputError(f"targets need q >= 2sP+1 = {2 * s * P + 1}, got q = {q}")
    for x, y in itertools.permutations(range(P), 2):
        t = separation_violation(gs[x], gs[y], s)
        if t is not None:
            raise InputError(f"targets {x} and {y} are not separated (shift {t})")
    for idx, g in enumerate(gs):
        if _matches(g, a):
            raise InputError(f"target {idx} already matches alpha")

    if P == 1:
        pair = no_matching_extend(ts, gs[0], a)
        return SerialExtension(pair.word, ((0, pair),), ())

    cur = a
    pending = list(range(P))
    pieces: list[tuple[int, ExtensionPair]] = []
    heads: list[int] = []
    while pending:
        live = [(ps[0].head, idx) for idx in pending if (ps := _partials(gs[idx], cur))]
        if not live:
            break
        head, idx = min(live)
        pair = no_matching_extend(ts, gs[idx], cur)
        pieces.append((idx, pair))
        heads.append(head)
        cur = cur + pair.word.letters
        pending.remove(idx)
        for other in pending:
            if _matches(gs[other], cur):
                raise DefectError(f"serial extension completed target {other} while treating {idx}")

    ext = cur[len(a):]
    if len(ext) > 2 * s * P:
        raise DefectError(f"serial extension of length {len(ext)} exceeds 2sP = {2 * s * P}")
    for idx, g in enumerate(gs):
        if not extension_is_safe(g, a, ext):
            raise DefectError(f"serial extension leaves target {idx} completable")
    log.debug("matching: serial extension %s over heads %s", Word(ext), heads)
    return SerialExtension(Word(ext), tuple(pieces), tuple(heads))


def shortest_safe_extension(ts: TransitionSystem, gammas, alpha, max_len: int) -> Word | None:
    """
    The shortest (then lexicographically least) tail of at most ``max_len``
    letters after which no head in ``alpha`` can complete any target.
    """
    gs = word_list(gammas)
    a = as_tuple(alpha)
    for length in range(0, max_len + 1):
        for tail in _continuations(ts, a[-1], length):
            if all(extension_is_safe(g, a, tail) for g in gs):
                return Word(tail)
    return None
