# symdyn/dynamics/game/__init__.py
from .balls import Ball
from .core import GameTranscript, Move, VerificationReport, play, verify_transcript
from .strategy import (
    BLACK_STRATEGIES,
    BlackPlayer,
    GameParams,
    StrategyState,
    WhiteStrategy,
    winning_ratio,
    winning_ratio_for,
)

__all__ = [
    "BLACK_STRATEGIES",
    "Ball",
    "BlackPlayer",
    "GameParams",
    "GameTranscript",
    "Move",
    "StrategyState",
    "VerificationReport",
    "WhiteStrategy",
    "play",
    "verify_transcript",
    "winning_ratio",
    "winning_ratio_for",
]
