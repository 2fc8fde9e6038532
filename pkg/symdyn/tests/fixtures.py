# symdyn/tests/fixtures.py
"""Partitions and targets shared by the test modules."""
from __future__ import annotations

import json
import pathlib

from symdyn.dynamics import codec
from symdyn.dynamics.sft import TransitionSystem

DYADIC = {
    "map": {"kind": "linear", "m": 2},
    "breakpoints": ["0/1", "1/2"],
    "endpoint_tolerant": True,
}

# {0, 1/4, 1/2} under doubling; letter 2 is degenerate (R_2 maps onto R_3)
THREE = {
    "map": {"kind": "linear", "m": 2},
    "breakpoints": ["0", "1/4", "1/2"],
}

# slopes 3 on [0, 1/3] and 3/2 on [1/3, 1]
SKEWED = {
    "map": {"kind": "piecewise-linear", "breakpoints": ["0", "1/3"], "slopes": ["3", "3/2"]},
    "breakpoints": ["0", "1/3"],
}

# {0, 1/3} is not Markov for doubling: T(1/3) = 2/3 is not a breakpoint
NOT_MARKOV = {
    "map": {"kind": "linear", "m": 2},
    "breakpoints": ["0", "1/3"],
}

# non-exceptional 12-string for s = 2
GAMMA = "2111111111121"

GOLDEN = [[1, 1], [1, 0]]


def dyadic():
    return codec.partition_from_json(DYADIC)


def three():
    return codec.partition_from_json(THREE)


def skewed():
    return codec.partition_from_json(SKEWED)


def golden() -> TransitionSystem:
    return TransitionSystem.from_matrix(GOLDEN)


def write(folder, name: str, data) -> str:
    path = pathlib.Path(folder) / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)
