# symdyn/dynamics/oracle.py
"""
Independent ground truth for avoidance sets: an Aho–Corasick automaton that
respects the transition matrix, exact word counts, and the spectral
dimension of the avoiding set on uniform partitions.
"""
from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import networkx as nx
import numpy as np
from django.conf import settings

from . import certified
from .errors import DefectError, InputError, UnsupportedError
from .sft import TransitionSystem, Word, as_tuple, is_valid_word, word_list

log = logging.getLogger(__name__)

Letters = tuple[int, ...]
State = tuple[int, int]          # (trie node, last letter)

BRUTE_FORCE_LIMIT: int = 20


# ----------------------------------------------------------------------------
# Automaton
# ----------------------------------------------------------------------------
@dataclass
class AvoidanceAutomaton:
    ts: TransitionSystem
    targets: tuple[Letters, ...]
    delta: list[dict[int, int]] = field(repr=False)
    terminal: list[bool] = field(repr=False)

    @classmethod
    def build(cls, ts: TransitionSystem, gammas: Sequence) -> "AvoidanceAutomaton":
        targets = tuple(as_tuple(g) for g in gammas)
        for g in targets:
            if not g:
                raise InputError("empty target word")
            ts.check_letters(g)

        goto: list[dict[int, int]] = [{}]
        terminal = [False]
        for g in targets:
            node = 0
            for x in g:
                nxt = goto[node].get(x)
                if nxt is None:
                    goto.append({})
                    terminal.append(False)
                    nxt = len(goto) - 1
                    goto[node][x] = nxt
                node = nxt
            terminal[node] = True

        fail = [0] * len(goto)
        delta: list[dict[int, int]] = [dict() for _ in goto]
        order = deque()
        for x in ts.letters:
            child = goto[0].get(x)
            if child is None:
                delta[0][x] = 0
            else:
                delta[0][x] = child
                order.append(child)
        while order:
            u = order.popleft()
            terminal[u] = terminal[u] or terminal[fail[u]]
            for x in ts.letters:
                child = goto[u].get(x)
                if child is None:
                    delta[u][x] = delta[fail[u]][x]
                else:
                    fail[child] = delta[fail[u]][x]
                    delta[u][x] = child
                    order.append(child)
        return cls(ts, targets, delta, terminal)

    def step(self, state: State | None, letter: int) -> State | None:
        """None is the dead state; ``state=None`` here means the empty word."""
        if state is None:
            node = self.delta[0][letter]
        else:
            node, last = state
            if not self.ts.allowed(last, letter):
                raise InputError(f"transition {last}->{letter} is not allowed")
            node = self.delta[node][letter]
        if self.terminal[node]:
            return None
        return (node, letter)

    def feed(self, word) -> State | None:
        state: State | None = None
        for k, x in enumerate(as_tuple(word)):
            state = self.step(state if k else None, x)
            if state is None:
                return None
        return state

    def successors(self, state: State) -> list[tuple[int, State]]:
        node, last = state
        out = []
        for x in self.ts.successors[last]:
            nxt = self.delta[node][x]
            if not self.terminal[nxt]:
                out.append((x, (nxt, x)))
        return out

    def initial(self) -> list[tuple[int, State]]:
        out = []
        for x in self.ts.letters:
            nxt = self.delta[0][x]
            if not self.terminal[nxt]:
                out.append((x, (nxt, x)))
        return out

    def shortest_death(self, state: State, budget: int) -> Letters | None:
        """Shortest continuation of at most ``budget`` letters that completes a target."""
        if budget <= 0:
            return None
        parent: dict[State, tuple[State | None, int]] = {state: (None, 0)}
        frontier = [state]
        for _ in range(budget):
            nxt_frontier = []
            for u in frontier:
                node, last = u
                for x in self.ts.successors[last]:
                    v_node = self.delta[node][x]
                    if self.terminal[v_node]:
                        path = [x]
                        cur = u
                        while parent[cur][0] is not None:
                            prev, letter = parent[cur]
                            path.append(letter)
                            cur = prev
                        return tuple(reversed(path))
                    v = (v_node, x)
                    if v not in parent:
                        parent[v] = (u, x)
                        nxt_frontier.append(v)
            frontier = nxt_frontier
        return None

    def live_states(self) -> list[State]:
        seen: set[State] = set()
        stack = [st for _, st in self.initial()]
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            stack.extend(v for _, v in self.successors(u))
        return sorted(seen)

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        for u in self.live_states():
            g.add_node(u)
            for _, v in self.successors(u):
                g.add_edge(u, v)
        return g


# ----------------------------------------------------------------------------
# Counting
# ----------------------------------------------------------------------------
def _automaton_counts(auto: AvoidanceAutomaton, max_n: int) -> list[int]:
    vec: dict[State, int] = {}
    for _, st in auto.initial():
        vec[st] = vec.get(st, 0) + 1
    counts = [sum(vec.values())]
    for _ in range(max_n):
        nxt: dict[State, int] = {}
        for u, c in vec.items():
            for _, v in auto.successors(u):
                nxt[v] = nxt.get(v, 0) + c
        vec = nxt
        counts.append(sum(vec.values()))
    return counts


def _brute_counts(ts: TransitionSystem, targets: Sequence[Letters], max_n: int) -> list[int]:
    """Direct depth-first enumeration; a word containing a target is not extended."""
    counts = [0] * (max_n + 1)
    stack: list[Letters] = [(x,) for x in ts.letters]
    while stack:
        w = stack.pop()
        if any(len(w) >= len(g) and w[-len(g):] == g for g in targets):
            continue
        counts[len(w) - 1] += 1
        if len(w) <= max_n:
            stack.extend(w + (y,) for y in ts.successors[w[-1]])
    return counts


def avoiding_counts(ts: TransitionSystem, gammas, max_n: int, cross_check: bool = True) -> list[int]:
    """Counts of avoiding n-strings for n = 0..max_n."""
    targets = word_list(gammas)
    for g in targets:
        if not is_valid_word(ts, g):
            raise InputError(f"target {Word(g)} is not valid")
    auto = AvoidanceAutomaton.build(ts, targets)
    counts = _automaton_counts(auto, max_n)
    if cross_check:
        limit = min(max_n, BRUTE_FORCE_LIMIT)
        brute = _brute_counts(ts, targets, limit)
        if brute != counts[:limit + 1]:
            raise DefectError(f"automaton counts {counts[:limit + 1]} disagree with enumeration {brute}")
    return counts


def count_avoiding(ts: TransitionSystem, gamma, n: int) -> int:
    if n < 0:
        raise InputError("n must be non-negative")
    return avoiding_counts(ts, gamma, n, cross_check=n <= BRUTE_FORCE_LIMIT)[n]


# ----------------------------------------------------------------------------
# Spectral dimension
# ----------------------------------------------------------------------------
@dataclass(frozen=True)
class SpectralResult:
    rho_interval: tuple[Fraction, Fraction]
    dimension: float
    dimension_interval: tuple[float, float]
    components: int
    iterations: int


def _collatz_wielandt(A: list[list[int]], x: np.ndarray) -> tuple[Fraction, Fraction]:
    xs = [Fraction(float(v)) for v in x]
    ratios = []
    for i, row in enumerate(A):
        acc = sum((Fraction(a) * xs[j] for j, a in enumerate(row) if a), Fraction(0))
        ratios.append(acc / xs[i])
    return min(ratios), max(ratios)


def perron_enclosure(A: list[list[int]], tol: float | None = None,
                     max_iter: int | None = None) -> tuple[Fraction, Fraction, int]:
    """
    Certified [lo, hi] around the spectral radius of an irreducible 0/1 matrix.

    Power iteration on A + I (primitive even when A is periodic) supplies a
    positive test vector; the Collatz–Wielandt quotients of A on that vector,
    evaluated exactly, bracket the radius.
    """
    tol = float(getattr(settings, "SYMDYN_ORACLE_TOLERANCE", 1e-9)) if tol is None else tol
    max_iter = int(getattr(settings, "SYMDYN_ORACLE_MAX_ITER", 10_000)) if max_iter is None else max_iter
    M = np.asarray(A, dtype=float)
    k = M.shape[0]
    B = M + np.eye(k)
    x = np.ones(k) / k
    lo, hi = Fraction(0), Fraction(k)
    it = 0
    for it in range(1, max_iter + 1):
        y = B @ x
        y = y / np.linalg.norm(y)
        if np.allclose(x, y, rtol=0.0, atol=1e-15) or it % 25 == 0:
            z = np.maximum(y, 1e-300)
            lo, hi = _collatz_wielandt(A, z)
            if hi - lo < tol:
                return lo, hi, it
        x = y
    z = np.maximum(x, 1e-300)
    lo, hi = _collatz_wielandt(A, z)
    log.warning("oracle: enclosure width %.3g after %s iterations", float(hi - lo), it)
    return lo, hi, it


def spectral_dimension(p, gammas) -> SpectralResult:
    """log ρ / log m for the set of points whose codes avoid every target."""
    if not p.is_uniform:
        raise UnsupportedError("spectral dimension needs a uniform partition of a linear map")
    targets = word_list(gammas)
    auto = AvoidanceAutomaton.build(p.ts, targets)
    graph = auto.graph()
    best_lo, best_hi = Fraction(0), Fraction(0)
    iterations = 0
    comps = 0
    for comp in nx.strongly_connected_components(graph):
        nodes = sorted(comp)
        if len(nodes) == 1 and not graph.has_edge(nodes[0], nodes[0]):
            continue
        comps += 1
        index = {u: k for k, u in enumerate(nodes)}
        A = [[0] * len(nodes) for _ in nodes]
        for u in nodes:
            for v in graph.successors(u):
                if v in index:
                    A[index[u]][index[v]] += 1
        lo, hi, it = perron_enclosure(A)
        iterations += it
        best_lo, best_hi = max(best_lo, lo), max(best_hi, hi)
    m = p.map.degree
    if best_hi == 0:
        return SpectralResult((Fraction(0), Fraction(0)), 0.0, (0.0, 0.0), comps, iterations)
    d_lo = float(certified.log_ratio(best_lo, m)[0]) if best_lo > 0 else -math.inf
    d_hi = float(certified.log_ratio(best_hi, m)[1])
    dim = (d_lo + d_hi) / 2
    log.info("oracle: rho in [%.12f, %.12f], dimension %.9f (%s component(s))",
             float(best_lo), float(best_hi), dim, comps)
    return SpectralResult((best_lo, best_hi), dim, (d_lo, d_hi), comps, iterations)
