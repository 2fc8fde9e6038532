# symdyn/dynamics/codec.py
"""JSON / JSONL / CSV encoding of rationals, partitions, words and game transcripts."""
from __future__ import annotations

import csv
import json
import logging
import pathlib
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .circle import ExpandingCircleMap, MarkovPartition, _fmt, build_custom_partition, frac
from .errors import InputError
from .game.core import GameTranscript, Move
from .game.strategy import GameParams
from .sft import Word

log = logging.getLogger(__name__)

SUMMARY_SUFFIX = ".summary.json"
VOLATILE_KEYS = frozenset({"created"})


def rational(x: Fraction) -> str:
    return _fmt(x)


def dumps(obj: Any) -> str:
    """Stable JSON text: sorted keys, rationals already rendered as strings."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)


def stable(obj: Any) -> Any:
    """Drops volatile keys (timestamps) for byte-level comparison."""
    if isinstance(obj, dict):
        return {k: stable(v) for k, v in obj.items() if k not in VOLATILE_KEYS}
    if isinstance(obj, list):
        return [stable(v) for v in obj]
    return obj


def read_json(path) -> Any:
    p = pathlib.Path(path)
    if not p.exists():
        raise InputError(f"file not found: {p}")
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{p}: invalid JSON ({exc})") from exc


def write_json(path, obj: Any) -> pathlib.Path:
    p = pathlib.Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(dumps(obj) + "\n", encoding="utf-8")
    return p


# ----------------------------------------------------------------------------
# Partitions
# ----------------------------------------------------------------------------
def map_from_json(data: dict) -> ExpandingCircleMap:
    kind = data.get("kind")
    if kind == "linear":
        return ExpandingCircleMap.linear(int(data["m"]))
    if kind == "piecewise-linear":
        return ExpandingCircleMap.piecewise(
            [frac(b) for b in data["breakpoints"]],
            [frac(s) for s in data["slopes"]],
            frac(data.get("offset", "0")),
        )
    raise InputError(f"unknown map kind {kind!r}")


def partition_from_json(data: dict) -> MarkovPartition:
    try:
        tmap = map_from_json(data["map"])
        bps = [frac(b) for b in data["breakpoints"]]
        letters = data.get("letters")
        order = None if letters is None else [int(x) - 1 for x in letters]
        return build_custom_partition(tmap, bps, bool(data.get("endpoint_tolerant", False)), order)
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad partition definition: missing or malformed {exc}") from exc


def load_partition(path) -> MarkovPartition:
    return partition_from_json(read_json(path))


# ----------------------------------------------------------------------------
# Transcripts
# ----------------------------------------------------------------------------
def summary_path(path) -> pathlib.Path:
    p = pathlib.Path(path)
    return p.with_name(p.stem + SUMMARY_SUFFIX)


def transcript_lines(t: GameTranscript) -> list[str]:
    return [json.dumps(mv.to_json(), sort_keys=True) for mv in t.moves]


def write_transcript(t: GameTranscript, path, extra: dict | None = None) -> pathlib.Path:
    p = pathlib.Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text("".join(line + "\n" for line in transcript_lines(t)), encoding="utf-8")
    summary = t.summary()
    if extra:
        summary.update(extra)
    write_json(summary_path(p), summary)
    log.info("codec: wrote %s moves to %s", len(t.moves), p)
    return p


def read_moves(path) -> list[Move]:
    p = pathlib.Path(path)
    if not p.exists():
        raise InputError(f"file not found: {p}")
    moves = []
    for k, line in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            moves.append(Move.from_json(json.loads(line)))
        except json.JSONDecodeError as exc:
            raise InputError(f"{p}:{k}: invalid JSON ({exc})") from exc
    return moves


def params_from_json(data: dict, partition: MarkovPartition | None = None, **overrides) -> GameParams:
    try:
        fields = {
            "partition": partition if partition is not None else partition_from_json(data["partition"]),
            "x0": frac(data["x0"]),
            "black_ratio": frac(data["black_ratio"]),
            "white_ratio": frac(data["white_ratio"]),
            "black_strategy": data.get("black_strategy", "random"),
            "seed": int(data.get("seed", 7)),
            "initial_radius": frac(data.get("initial_radius", "1/4")),
            "targets_mode": data.get("targets_mode", "all"),
            "recorded": tuple(frac(c) for c in data.get("recorded", [])),
            "jitter": frac(data.get("jitter", "0")),
        }
    except KeyError as exc:
        raise InputError(f"game parameters lack {exc}") from exc
    fields.update(overrides)
    return GameParams(**fields)


def load_transcript(path) -> GameTranscript:
    """Moves from the JSONL file plus parameters and targets from its summary."""
    summary = read_json(summary_path(path))
    params = params_from_json(summary["params"])
    t = GameTranscript(params, moves=read_moves(path))
    t.Q = summary.get("Q")
    t.J, t.L1, t.P = summary.get("J"), summary.get("L1"), summary.get("P")
    t.targets = tuple(Word.parse(g) for g in summary.get("targets", []))
    flags = summary.get("flags", {})
    t.out_of_theorem = bool(flags.get("out_of_theorem", False))
    t.q_window_ok = bool(flags.get("q_window_ok", True))
    t.failed = bool(flags.get("failed", False))
    t.q_history = list(summary.get("q_history", []))
    return t


# ----------------------------------------------------------------------------
# Tables
# ----------------------------------------------------------------------------
def write_csv(path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> pathlib.Path:
    p = pathlib.Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with p.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
    return p
