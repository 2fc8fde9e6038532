# symdyn/dynamics/sft.py
"""
Subshifts of finite type: transition systems, finite words, degenerate
letters and block decomposition.

Letters are 1-based everywhere a caller can see them. An *n-string* has
n+1 letters; ``Word.n`` is that n.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from django.conf import settings

from .errors import InputError, ResourceError

log = logging.getLogger(__name__)

DEFAULT_ENUMERATION_CAP: int = 10_000_000


# ----------------------------------------------------------------------------
# Words
# ----------------------------------------------------------------------------
@dataclass(frozen=True)
class Word:
    letters: tuple[int, ...]
    start: int = 0

    def __post_init__(self):
        if not isinstance(self.letters, tuple):
            object.__setattr__(self, "letters", tuple(int(x) for x in self.letters))

    @classmethod
    def of(cls, w: "Word | Sequence[int] | str", start: int = 0) -> "Word":
        if isinstance(w, Word):
            return w
        if isinstance(w, str):
            return cls.parse(w, start=start)
        return cls(tuple(int(x) for x in w), start)

    @classmethod
    def parse(cls, text: str, start: int = 0) -> "Word":
        """Digits for alphabets up to 9, space separated integers otherwise."""
        text = (text or "").strip()
        if not text:
            return cls((), start)
        try:
            if " " in text or "," in text:
                parts = text.replace(",", " ").split()
                return cls(tuple(int(p) for p in parts), start)
            return cls(tuple(int(ch) for ch in text), start)
        except ValueError as exc:
            raise InputError(f"cannot parse word {text!r}") from exc

    @property
    def n(self) -> int:
        return len(self.letters) - 1

    @property
    def end(self) -> int:
        return self.start + len(self.letters) - 1

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return Word(self.letters[idx])
        return self.letters[idx]

    def __add__(self, other) -> "Word":
        tail = other.letters if isinstance(other, Word) else tuple(other)
        return Word(self.letters + tail, self.start)

    def format(self, size: int | None = None) -> str:
        if size is not None and size > 9 or any(x > 9 for x in self.letters):
            return " ".join(str(x) for x in self.letters)
        return "".join(str(x) for x in self.letters)

    def __str__(self) -> str:
        return self.format()


def as_tuple(w: "Word | Sequence[int] | str") -> tuple[int, ...]:
    if isinstance(w, Word):
        return w.letters
    if isinstance(w, str):
        return Word.parse(w).letters
    return tuple(int(x) for x in w)


# ----------------------------------------------------------------------------
# Transition systems
# ----------------------------------------------------------------------------
@dataclass(frozen=True)
class TransitionSystem:
    size: int
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(1 if int(v) else 0 for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", rows)
        s = self.size
        if s < 2:
            raise InputError("alphabets need at least two letters")
        if len(rows) != s or any(len(r) != s for r in rows):
            raise InputError(f"matrix must be {s}x{s}")
        for i, row in enumerate(rows, start=1):
            if not any(row):
                raise InputError(f"letter {i} has no valid successor")
        if all(sum(r) == 1 for r in rows):
            raise InputError("every letter is degenerate")
        # A forced loop would make blocks unbounded.
        for i in range(1, s + 1):
            seen = set()
            cur = i
            while sum(rows[cur - 1]) == 1:
                if cur in seen:
                    raise InputError(f"degenerate-only cycle through letter {cur}")
                seen.add(cur)
                cur = rows[cur - 1].index(1) + 1

    @classmethod
    def full_shift(cls, s: int) -> "TransitionSystem":
        return cls(s, tuple(tuple(1 for _ in range(s)) for _ in range(s)))

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[int]]) -> "TransitionSystem":
        return cls(len(matrix), tuple(tuple(r) for r in matrix))

    @classmethod
    def from_json(cls, data: dict) -> "TransitionSystem":
        try:
            return cls(int(data["s"]), tuple(tuple(r) for r in data["matrix"]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad transition system: {exc}") from exc

    def to_json(self) -> dict:
        return {"s": self.size, "matrix": [list(r) for r in self.matrix]}

    @property
    def letters(self) -> range:
        return range(1, self.size + 1)

    def allowed(self, i: int, j: int) -> bool:
        return self.matrix[i - 1][j - 1] == 1

    @cached_property
    def successors(self) -> dict[int, tuple[int, ...]]:
        return {
            i: tuple(j for j in self.letters if self.matrix[i - 1][j - 1])
            for i in self.letters
        }

    @cached_property
    def predecessors(self) -> dict[int, tuple[int, ...]]:
        return {
            j: tuple(i for i in self.letters if self.matrix[i - 1][j - 1])
            for j in self.letters
        }

    def is_degenerate(self, i: int) -> bool:
        return len(self.successors[i]) == 1

    def check_letters(self, w: Iterable[int]) -> None:
        for x in w:
            if not 1 <= x <= self.size:
                raise InputError(f"letter {x} outside 1..{self.size}")


@dataclass(frozen=True)
class LetterClassification:
    degenerate: dict[int, bool]
    successor_sets: dict[int, tuple[int, ...]]

    @property
    def degenerate_letters(self) -> tuple[int, ...]:
        return tuple(i for i, d in self.degenerate.items() if d)


def classify_letters(ts: TransitionSystem) -> LetterClassification:
    succ = ts.successors
    return LetterClassification(
        degenerate={i: len(succ[i]) == 1 for i in ts.letters},
        successor_sets=dict(succ),
    )


def is_valid_word(ts: TransitionSystem, w) -> bool:
    letters = as_tuple(w)
    ts.check_letters(letters)
    return all(ts.matrix[a - 1][b - 1] for a, b in zip(letters, letters[1:]))


def _require_valid(ts: TransitionSystem, w, what: str = "word") -> tuple[int, ...]:
    letters = as_tuple(w)
    if not is_valid_word(ts, letters):
        raise InputError(f"{what} {Word(letters)} is not a valid string")
    return letters


# ----------------------------------------------------------------------------
# Enumeration
# ----------------------------------------------------------------------------
def _enumeration_cap() -> int:
    return int(getattr(settings, "SYMDYN_ENUMERATION_CAP", DEFAULT_ENUMERATION_CAP))


def count_words(ts: TransitionSystem, n: int, prefix=None) -> int:
    """|Σ(n)|, or the number of n-strings beginning with ``prefix``."""
    if n < 0:
        return 0
    pre = _require_valid(ts, prefix, "prefix") if prefix else ()
    if len(pre) > n + 1:
        return 0
    if pre:
        vec = {pre[-1]: 1}
        remaining = n + 1 - len(pre)
    else:
        vec = {i: 1 for i in ts.letters}
        remaining = n
    for _ in range(remaining):
        nxt: dict[int, int] = {}
        for i, c in vec.items():
            for j in ts.successors[i]:
                nxt[j] = nxt.get(j, 0) + c
        vec = nxt
    return sum(vec.values())


def iter_words(ts: TransitionSystem, n: int, prefix=None) -> Iterator[tuple[int, ...]]:
    """Streams Σ(n) (or the extensions of ``prefix`` inside it) in lexicographic order."""
    pre = _require_valid(ts, prefix, "prefix") if prefix else ()
    length = n + 1
    if n < 0 or len(pre) > length:
        return
    succ = ts.successors
    if not pre:
        stack: list[tuple[int, ...]] = [(i,) for i in reversed(ts.letters)]
    else:
        stack = [pre]
    while stack:
        w = stack.pop()
        if len(w) == length:
            yield w
            continue
        for j in reversed(succ[w[-1]]):
            stack.append(w + (j,))


def enumerate_words(ts: TransitionSystem, n: int, prefix=None) -> list[Word]:
    if n < 0:
        raise InputError("n must be non-negative")
    total = count_words(ts, n, prefix)
    cap = _enumeration_cap()
    if total > cap:
        raise ResourceError(f"|Σ({n})| = {total} exceeds the enumeration cap {cap}; use iter_words")
    return [Word(w) for w in iter_words(ts, n, prefix)]


def extensions(ts: TransitionSystem, prefix, q: int) -> list[Word]:
    """Σ_prefix(q): valid words extending ``prefix`` by exactly q letters."""
    pre = as_tuple(prefix)
    return enumerate_words(ts, len(pre) - 1 + q, pre)


# ----------------------------------------------------------------------------
# Blocks
# ----------------------------------------------------------------------------
BLOCK = "block"
GENERAL_BLOCK = "general-block"
REVERSE_BLOCK = "reverse-block"
DOUBLE_GENERAL_BLOCK = "double-general-block"
OPEN = "open"


@dataclass(frozen=True)
class Segment:
    start: int
    end: int
    kind: str

    @property
    def length(self) -> int:
        return self.end - self.start + 1


@dataclass(frozen=True)
class BlockDecomposition:
    segments: tuple[Segment, ...]
    nondegenerate_positions: tuple[int, ...]
    maximal: tuple[Segment, ...] = field(default=())

    def of_kind(self, kind: str) -> list[Segment]:
        return [g for g in self.segments + self.maximal if g.kind == kind]


def segment_kind(ts: TransitionSystem, w) -> str | None:
    """Most specific block kind of a whole string, None if it is none of them."""
    letters = as_tuple(w)
    if not letters:
        return None
    nd = [k for k, x in enumerate(letters) if not ts.is_degenerate(x)]
    if not nd:
        return OPEN
    if len(nd) == 1:
        if nd[0] == len(letters) - 1:
            return BLOCK
        if nd[0] == 0:
            return REVERSE_BLOCK
        return GENERAL_BLOCK
    if len(nd) == 2 and nd[1] == nd[0] + 1:
        return DOUBLE_GENERAL_BLOCK
    return None


def is_general_block(ts: TransitionSystem, w) -> bool:
    letters = as_tuple(w)
    return bool(letters) and sum(1 for x in letters if not ts.is_degenerate(x)) == 1


def is_double_general_block(ts: TransitionSystem, w) -> bool:
    return segment_kind(ts, w) == DOUBLE_GENERAL_BLOCK


def block_decompose(ts: TransitionSystem, w) -> BlockDecomposition:
    letters = _require_valid(ts, w)
    nd = tuple(k for k, x in enumerate(letters) if not ts.is_degenerate(x))
    segs: list[Segment] = []
    begin = 0
    for k in nd:
        segs.append(Segment(begin, k, BLOCK))
        begin = k + 1
    if begin < len(letters):
        segs.append(Segment(begin, len(letters) - 1, OPEN))

    last = len(letters) - 1
    maximal: list[Segment] = []
    for idx, p in enumerate(nd):
        lo = nd[idx - 1] + 1 if idx > 0 else 0
        hi = nd[idx + 1] - 1 if idx + 1 < len(nd) else last
        maximal.append(Segment(lo, hi, GENERAL_BLOCK))
        maximal.append(Segment(p, hi, REVERSE_BLOCK))
        if idx + 1 < len(nd) and nd[idx + 1] == p + 1:
            hi2 = nd[idx + 2] - 1 if idx + 2 < len(nd) else last
            maximal.append(Segment(lo, hi2, DOUBLE_GENERAL_BLOCK))
    return BlockDecomposition(tuple(segs), nd, tuple(maximal))


def max_block_length(ts: TransitionSystem) -> int:
    """Longest degenerate-only run plus one; at most s."""
    longest = 0
    for i in ts.letters:
        run, cur = 0, i
        while ts.is_degenerate(cur):
            run += 1
            cur = ts.successors[cur][0]
        longest = max(longest, run)
    b = longest + 1
    assert b <= ts.size, "block length exceeds alphabet size"
    return b


def forced_run(ts: TransitionSystem, letter: int) -> tuple[int, ...]:
    """Letters forced after ``letter`` up to and including the next nondegenerate one."""
    out: list[int] = []
    cur = letter
    while ts.is_degenerate(cur):
        cur = ts.successors[cur][0]
        out.append(cur)
    return tuple(out)


def word_list(x) -> list[tuple[int, ...]]:
    """One word or a collection of words, as letter tuples."""
    if isinstance(x, (Word, str)):
        return [as_tuple(x)]
    items = list(x)
    if items and isinstance(items[0], int):
        return [tuple(items)]
    return [as_tuple(w) for w in items]
