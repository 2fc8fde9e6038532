# symdyn/dynamics/game/core.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from django.conf import settings

from ..circle import CylinderSet, MarkovPartition, _fmt, boundary_ops, cylinder, frac, representations_of
from ..errors import InputError, StrategyFailure
from ..matching import find_matches
from ..sft import Word
from .balls import Ball
from .strategy import BlackPlayer, GameParams, WhiteStrategy, winning_ratio

log = logging.getLogger(__name__)

BLACK, WHITE = "B", "W"


# ----------------------------------------------------------------------------
# Transcript
# ----------------------------------------------------------------------------
@dataclass(frozen=True)
class Move:
    turn: int
    player: str
    ball: Ball
    phase: str
    word: Word | None = None

    def to_json(self) -> dict:
        out = {"turn": self.turn, "player": self.player, **self.ball.to_json(), "phase": self.phase}
        if self.word is not None:
            out["word"] = self.word.format()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Move":
        try:
            player = data["player"]
            if player not in (BLACK, WHITE):
                raise InputError(f"unknown player {player!r}")
            word = data.get("word")
            return cls(
                int(data["turn"]),
                player,
                Ball(frac(data["center"]), frac(data["radius"])),
                str(data["phase"]),
                Word.parse(word) if word else None,
            )
        except KeyError as exc:
            raise InputError(f"transcript line lacks {exc}") from exc


@dataclass
class GameTranscript:
    params: GameParams
    moves: list[Move] = field(default_factory=list)
    snapshots: list[dict] = field(default_factory=list)
    targets: tuple[Word, ...] = ()
    Q: int | None = None
    J: int | None = None
    L1: int | None = None
    P: int | None = None
    winning_ratio: Fraction | None = None
    out_of_theorem: bool = False
    q_window_ok: bool = True
    q_history: list[int] = field(default_factory=list)
    failed: bool = False
    failure: str | None = None

    @property
    def certificate(self) -> Word | None:
        for mv in reversed(self.moves):
            if mv.player == WHITE and mv.word is not None:
                return mv.word
        return None

    @property
    def final_ball(self) -> Ball | None:
        return self.moves[-1].ball if self.moves else None

    def summary(self) -> dict:
        cert = self.certificate
        return {
            "params": self.params.to_json(),
            "rounds": sum(1 for mv in self.moves if mv.player == WHITE),
            "winning_ratio": _fmt(self.winning_ratio) if self.winning_ratio is not None else None,
            "J": self.J,
            "L1": self.L1,
            "P": self.P,
            "Q": self.Q,
            "targets": [g.format() for g in self.targets],
            "certificate": cert.format() if cert is not None else None,
            "certificate_length": len(cert) if cert is not None else 0,
            "q_history": list(self.q_history),
            "flags": {
                "out_of_theorem": self.out_of_theorem,
                "q_window_ok": self.q_window_ok,
                "failed": self.failed,
            },
            "failure": self.failure,
        }


# ----------------------------------------------------------------------------
# Play
# ----------------------------------------------------------------------------
def is_out_of_theorem(params: GameParams) -> bool:
    return params.white_ratio > winning_ratio(params.partition) or params.white_ratio > Fraction(1, 2)


def play(params: GameParams, rounds: int) -> GameTranscript:
    if rounds < 1:
        raise InputError("rounds must be at least 1")
    black = BlackPlayer(params)
    white = WhiteStrategy(params)
    t = GameTranscript(params, winning_ratio=winning_ratio(params.partition),
                       out_of_theorem=is_out_of_theorem(params))
    if t.out_of_theorem:
        log.warning("game: white ratio %s is outside the winning range (%s)", params.white_ratio, t.winning_ratio)

    B = black.first()
    for turn in range(1, rounds + 1):
        t.moves.append(Move(turn, BLACK, B, "black"))
        try:
            wm = white.move(turn, B)
        except StrategyFailure as exc:
            _close(t, white)
            t.failed, t.failure = True, str(exc)
            if not t.out_of_theorem:
                exc.transcript = t
                raise
            log.warning("game: out-of-theorem run stopped at turn %s", turn)
            return t
        t.moves.append(Move(turn, WHITE, wm.ball, wm.phase, wm.word))
        t.snapshots.append({"turn": turn, "phase": wm.phase, **wm.info})
        if turn < rounds:
            B = black.move(wm.ball)

    _close(t, white)
    if t.certificate is None:
        t.failed, t.failure = True, "descent never started"
        log.warning("game: no certificate after %s rounds", rounds)
    return t


def _close(t: GameTranscript, white: WhiteStrategy) -> None:
    st = white.state
    t.targets, t.Q, t.J, t.L1, t.P = st.targets, st.Q, st.J, st.L1, st.P
    t.q_window_ok = st.q_window_ok
    t.q_history = list(st.q_history)


# ----------------------------------------------------------------------------
# Verification
# ----------------------------------------------------------------------------
@dataclass
class VerificationReport:
    passed: bool = False
    ratios_ok: bool = True
    certificate_ok: bool = True
    orbit_ok: bool = True
    covers_neighborhood: bool = False
    horizon: int = 0
    certificate_length: int = 0
    neighborhood: list[dict] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)

    def fail(self, check: str, **detail) -> None:
        self.failures.append({"check": check, **detail})

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "checks": {
                "ratios": self.ratios_ok,
                "certificate": self.certificate_ok,
                "orbit": self.orbit_ok,
                "neighborhood": self.covers_neighborhood,
            },
            "horizon": self.horizon,
            "certificate_length": self.certificate_length,
            "neighborhood": self.neighborhood,
            "failures": self.failures,
        }


def _check_ratios(t: GameTranscript, rep: VerificationReport) -> None:
    m, n = t.params.black_ratio, t.params.white_ratio
    prev: Move | None = None
    for mv in t.moves:
        if prev is not None:
            ratio = n if mv.player == WHITE else m
            if mv.player == prev.player:
                rep.ratios_ok = False
                rep.fail("ratios", turn=mv.turn, reason="players do not alternate")
            elif mv.ball.radius != ratio * prev.ball.radius:
                rep.ratios_ok = False
                rep.fail("ratios", turn=mv.turn, player=mv.player,
                         reason=f"radius {_fmt(mv.ball.radius)} != {_fmt(ratio)} x {_fmt(prev.ball.radius)}")
            elif not prev.ball.contains_ball(mv.ball):
                rep.ratios_ok = False
                rep.fail("ratios", turn=mv.turn, player=mv.player, reason="ball is not nested")
        prev = mv


def expected_targets(p: MarkovPartition, x0: Fraction, Q: int, mode: str) -> tuple[Word, ...]:
    words = representations_of(p, x0, Q).words
    return tuple(words[:1]) if mode == "single" else tuple(words)


def _check_certificate(t: GameTranscript, p: MarkovPartition, targets, rep: VerificationReport) -> CylinderSet | None:
    last: Word | None = None
    final: CylinderSet | None = None
    for mv in t.moves:
        if mv.player != WHITE or mv.word is None:
            continue
        w = mv.word
        hits = {g.format(): find_matches(g, w) for g in targets if find_matches(g, w)}
        if hits:
            rep.certificate_ok = False
            rep.fail("certificate", turn=mv.turn, word=w.format(), matches=hits)
        if last is not None and w.letters[:len(last)] != last.letters:
            rep.certificate_ok = False
            rep.fail("certificate", turn=mv.turn, reason="word does not extend the previous certificate")
        try:
            cyl = cylinder(p, w)
        except InputError as exc:
            rep.certificate_ok = False
            rep.fail("certificate", turn=mv.turn, reason=str(exc))
            continue
        if not (cyl.lo <= mv.ball.lo and mv.ball.hi <= cyl.hi):
            rep.certificate_ok = False
            rep.fail("certificate", turn=mv.turn, reason="ball leaves its certified cylinder")
        last, final = w, cyl
    if last is None:
        rep.certificate_ok = False
        rep.fail("certificate", reason="no certificate word")
    else:
        rep.certificate_length = len(last)
    return final


def _check_orbit(t: GameTranscript, p: MarkovPartition, targets, horizon: int, rep: VerificationReport) -> None:
    final = t.moves[-1] if t.moves else None
    if final is None or final.player != WHITE or final.word is None:
        rep.orbit_ok = False
        rep.fail("orbit", reason="the last move is not a certified White move")
        return
    cyls = [cylinder(p, g) for g in targets]
    x = final.ball.center
    for k in range(horizon + 1):
        for g, c in zip(targets, cyls):
            if c.interior_contains(x):
                rep.orbit_ok = False
                rep.fail("orbit", iterate=k, point=_fmt(x), target=g.format())
                return
        x = p.T(x)


def _check_neighborhood(p: MarkovPartition, x0: Fraction, Q: int, targets, rep: VerificationReport) -> None:
    adj = boundary_ops(p).adjacency_set(x0, Q)
    protected = {g.letters for g in targets}
    left = right = False
    for c in adj:
        rep.neighborhood.append({"word": c.word.format(), "lo": _fmt(c.lo), "hi": _fmt(c.hi),
                                 "avoided": c.word.letters in protected})
        if c.word.letters not in protected:
            continue
        if c.lo < x0 <= c.hi or (x0 == 0 and c.hi == 1):
            left = True
        if c.lo <= x0 < c.hi:
            right = True
    rep.covers_neighborhood = left and right


def verify_transcript(t: GameTranscript, p: MarkovPartition | None = None, x0=None,
                      horizon: int | None = None) -> VerificationReport:
    p = t.params.partition if p is None else p
    x0 = t.params.x0 if x0 is None else frac(x0) % 1
    horizon = int(getattr(settings, "SYMDYN_ORBIT_HORIZON", 1000)) if horizon is None else horizon
    rep = VerificationReport(horizon=horizon)

    _check_ratios(t, rep)
    if t.Q is None:
        rep.certificate_ok = rep.orbit_ok = False
        rep.fail("certificate", reason="no target length recorded")
        return rep

    targets = expected_targets(p, x0, t.Q, t.params.targets_mode)
    if tuple(g.letters for g in targets) != tuple(g.letters for g in t.targets):
        rep.certificate_ok = False
        rep.fail("certificate", reason="recorded targets differ from the representations of x0",
                 expected=[g.format() for g in targets], recorded=[g.format() for g in t.targets])
    _check_certificate(t, p, targets, rep)
    _check_orbit(t, p, targets, horizon, rep)
    _check_neighborhood(p, x0, t.Q, targets, rep)

    rep.passed = rep.ratios_ok and rep.certificate_ok and rep.orbit_ok
    if t.params.targets_mode == "all":
        rep.passed = rep.passed and rep.covers_neighborhood
    if rep.passed:
        log.info("game: transcript verified (certificate length %s, horizon %s)", rep.certificate_length, horizon)
    else:
        log.warning("game: verification failed: %s", rep.failures[:3])
    return rep
