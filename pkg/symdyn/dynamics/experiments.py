# symdyn/dynamics/experiments.py
"""
Orchestration shared by the management commands and the REST views:
reproduction of the three tree-like counterexamples, the dimension-bound
experiment table, and batches of Schmidt games.
"""
from __future__ import annotations

import logging
import pathlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Sequence

from django.conf import settings

from . import codec
from .circle import MarkovPartition, _fmt, build_uniform_partition, frac, representations_of
from .errors import CollectionDeathError, DefectError, InputError, StrategyFailure, UnsupportedError
from .game import GameParams, play, verify_transcript
from .oracle import spectral_dimension
from .sft import Word
from .treelike import (
    TSENG,
    URBANSKI,
    VARIANTS,
    build_levels,
    closed_form_bound,
    certify_corrected_density,
    corrected_density_floor,
    density_and_delta,
    element_density,
    hd_lower_bound,
)

log = logging.getLogger(__name__)

SEED_LIMIT = 2 ** 64


# ----------------------------------------------------------------------------
# Config
# ----------------------------------------------------------------------------
@dataclass
class ExperimentConfig:
    partition: MarkovPartition
    gammas: list[Word] = field(default_factory=list)
    q: int = 0
    k_max: int = 1
    variant: str = TSENG
    first_letter: int | None = None
    game: dict = field(default_factory=dict)
    seeds: list[int] = field(default_factory=list)
    rounds: int = 60
    output: pathlib.Path | None = None


def load_config(data: dict | str | pathlib.Path, base_dir: pathlib.Path | None = None) -> ExperimentConfig:
    """
    Validates a JSON experiment config. ``partition`` is a file path (relative
    to the config) or an inline definition; ``targets`` holds words, ``points``
    holds rationals whose every representation truncated at q becomes a target.
    """
    if not isinstance(data, dict):
        path = pathlib.Path(data)
        base_dir = path.parent
        data = codec.read_json(path)
    base_dir = base_dir or pathlib.Path(".")

    part = data.get("partition")
    if isinstance(part, str):
        ppath = pathlib.Path(part)
        ppath = ppath if ppath.is_absolute() else base_dir / ppath
        partition = codec.load_partition(ppath)
    elif isinstance(part, dict):
        partition = codec.partition_from_json(part)
    else:
        raise InputError("config.partition must be a file path or an inline partition")

    q = int(data.get("q", 0))
    gammas = [Word.parse(str(g)) for g in data.get("targets", [])]
    for x in data.get("points", []):
        if q < 1:
            raise InputError("config.points needs config.q")
        gammas.extend(representations_of(partition, frac(x), q).words)

    variant = data.get("variant", TSENG)
    if variant not in VARIANTS:
        raise InputError(f"config.variant must be one of {VARIANTS}, got {variant!r}")
    seeds = [int(s) for s in data.get("seeds", [])]
    bad = [s for s in seeds if not 0 <= s < SEED_LIMIT]
    if bad:
        raise InputError(f"config.seeds must be 64-bit integers, got {bad[:3]}")
    out = data.get("output")
    first = data.get("first_letter")
    return ExperimentConfig(
        partition=partition,
        gammas=gammas,
        q=q,
        k_max=int(data.get("k_max", 1)),
        variant=variant,
        first_letter=int(first) if first is not None else None,
        game=dict(data.get("game", {})),
        seeds=seeds,
        rounds=int(data.get("rounds", 60)),
        output=pathlib.Path(out) if out else None,
    )


# ----------------------------------------------------------------------------
# Counterexamples
# ----------------------------------------------------------------------------
@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    witness: list[str] = field(default_factory=list)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        extra = f" witness={','.join(self.witness)}" if self.witness else ""
        return f"{tag} {self.name}{extra}"

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail, "witness": self.witness}


def _dyadic() -> MarkovPartition:
    return build_uniform_partition(2, 1)


def example_one(gamma: str = "211") -> CheckResult:
    """q=2: R_12221 ∈ E_2 while both R_12221·1·* leave E_3."""
    p = _dyadic()
    tc = build_levels(p, [gamma], 2, 3, first_letter=1, explicit=True)
    alpha = Word.parse("12221")
    kids = [alpha + (1, x) for x in p.ts.letters]
    survivors = [w.format() for w in kids if tc.contains(3, w)]
    ok = tc.contains(2, alpha) and not survivors
    return CheckResult("example-1", ok, {"gamma": gamma, "alpha": alpha.format(),
                                         "in_E2": tc.contains(2, alpha)}, survivors)


def example_two(gamma: str = "21211") -> CheckResult:
    """q=4: R_α ∈ E_2 for α = 111112121, but every R_α1*** and R_α211* leaves E_3."""
    p = _dyadic()
    tc = build_levels(p, [gamma], 4, 3, explicit=True)
    alpha = Word.parse("111112121")
    tails = [(1,) + t for t in _tails(p, 3)] + [(2, 1, 1, x) for x in p.ts.letters]
    survivors = [(alpha + t).format() for t in tails if tc.contains(3, alpha + t)]
    ok = tc.contains(2, alpha) and not survivors
    return CheckResult("example-2", ok, {"gamma": gamma, "alpha": alpha.format(),
                                         "in_E2": tc.contains(2, alpha)}, survivors)


def _tails(p: MarkovPartition, n: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = [()]
    for _ in range(n):
        out = [t + (x,) for t in out for x in p.ts.letters]
    return out


def third_example_setup(s_exponent: int, q: int) -> tuple[MarkovPartition, Word]:
    """2^s-adic partition with letters c = 2^(s-1) and 1 exchanged; γ = a^q b."""
    p = build_uniform_partition(2, s_exponent).swap_letters(2 ** (s_exponent - 1), 1)
    a, b = p.size, p.size - 1
    return p, Word((a,) * q + (b,))


def example_three(s_exponent: int = 2, q: int = 8, k: int = 50, tolerance: float = 1e-2) -> CheckResult:
    """density(E_{k+1}, R_α) = 2^-q for α = 1 a^(kq); Δ_j = 2^-q; the bound tends to 0."""
    p, gamma = third_example_setup(s_exponent, q)
    a = p.size
    tc = build_levels(p, [gamma], q, k + 1, first_letter=1)
    target = Fraction(1, 2 ** q)
    alpha = Word((1,) + (a,) * q)
    rep = density_and_delta(tc, 1)
    alpha_density = element_density(tc, alpha)
    deltas_ok = all(d == target for d in tc.deltas[:k])
    bound = float(hd_lower_bound(tc, k))
    ok = alpha_density == target and deltas_ok and abs(bound) <= tolerance
    detail = {
        "s_exponent": s_exponent, "q": q, "k": k,
        "density_alpha": _fmt(alpha_density),
        "delta": _fmt(tc.deltas[0]), "deltas_equal": deltas_ok, "bound": bound,
    }
    return CheckResult(f"example-3[s={s_exponent}]", ok, detail,
                       [] if ok else [w.format(p.size) for w in rep.witnesses[:3]])


def reproduce_examples(s_exponents: Sequence[int] = (2, 3, 4), overrides: dict | None = None) -> list[CheckResult]:
    overrides = overrides or {}
    results = [
        example_one(overrides.get("example-1", "211")),
        example_two(overrides.get("example-2", "21211")),
    ]
    results.extend(example_three(s) for s in s_exponents)
    for r in results:
        (log.info if r.passed else log.warning)("reproduce: %s", r.line())
    return results


# ----------------------------------------------------------------------------
# Dimension-bound experiment
# ----------------------------------------------------------------------------
HD_HEADER = ("k", "count", "delta", "diameter", "bound")
CORRECTED_SAMPLE = 64


@dataclass
class HdExperiment:
    rows: list[tuple] = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def hd_experiment(cfg: ExperimentConfig) -> HdExperiment:
    if not cfg.gammas:
        raise InputError("config.targets (or config.points) is empty")
    q = cfg.q or len(cfg.gammas[0]) - 1
    p = cfg.partition
    tc = build_levels(p, cfg.gammas, q, cfg.k_max, cfg.variant, cfg.first_letter)
    out = HdExperiment()
    for k in range(1, cfg.k_max + 1):
        delta = tc.deltas[k - 1] if k <= len(tc.deltas) else None
        bound: float | str = ""
        if delta is not None:
            try:
                bound = float(hd_lower_bound(tc, k))
            except (CollectionDeathError, InputError) as exc:
                log.debug("experiment: no bound at k=%s (%s)", k, exc)
        out.rows.append((k, tc.counts[k - 1], _fmt(delta) if delta is not None else "",
                         _fmt(tc.diams[k - 1]), bound))

    summary: dict[str, Any] = {
        "variant": cfg.variant,
        "q": q,
        "k_max": cfg.k_max,
        "targets": [g.format(p.size) for g in cfg.gammas],
        "death_level": tc.death_level,
        "closed_form": {},
    }
    if tc.death_level is not None:
        log.warning("experiment: collection dies at level %s", tc.death_level)
    try:
        summary["closed_form"][URBANSKI] = closed_form_bound(URBANSKI, p, q)
        summary["closed_form"]["corrected"] = closed_form_bound("corrected", p, q, len(cfg.gammas))
        summary["corrected_floor"] = _fmt(corrected_density_floor(p, len(cfg.gammas)))
    except (ValueError, InputError) as exc:
        log.debug("experiment: closed form unavailable (%s)", exc)
    if cfg.variant == URBANSKI:
        summary["delta_at_least_half"] = all(d >= Fraction(1, 2) for d in tc.deltas)
    else:
        summary["corrected_density"] = _corrected_summary(tc)
    try:
        spec = spectral_dimension(p, cfg.gammas)
        summary["oracle"] = {"dimension": spec.dimension,
                             "rho_interval": [_fmt(spec.rho_interval[0]), _fmt(spec.rho_interval[1])]}
        bounds = [r[4] for r in out.rows if isinstance(r[4], float)]
        summary["sandwich_ok"] = all(b <= spec.dimension_interval[1] + 1e-6 for b in bounds) and spec.dimension <= 1
    except UnsupportedError:
        summary["oracle"] = None
    out.summary = summary
    return out


def _corrected_summary(tc, sample: int = CORRECTED_SAMPLE) -> dict | None:
    """Serial extensions of the deepest level with children stay inside the next level."""
    alive = [k for k in range(1, tc.k_max) if tc.counts[k - 1] and tc.counts[k]]
    if not alive:
        return None
    k = alive[-1]
    try:
        failures = certify_corrected_density(tc, k, sample=sample)
    except (InputError, DefectError) as exc:
        log.warning("experiment: corrected density not certified at level %s (%s)", k, exc)
        return {"level": k, "checked": 0, "error": str(exc)}
    for f in failures:
        f["ratio"] = _fmt(f["ratio"])
    elements = tc.counts[k - 1] if tc.levels is not None else len(tc.profiles[k - 1])
    return {"level": k, "checked": min(sample, elements), "failures": failures}


def write_hd_experiment(exp: HdExperiment, csv_path, json_path=None) -> None:
    codec.write_csv(csv_path, HD_HEADER, exp.rows)
    if json_path is not None:
        codec.write_json(json_path, exp.summary)


# ----------------------------------------------------------------------------
# Games
# ----------------------------------------------------------------------------
def run_game(params: GameParams, rounds: int, horizon: int | None = None) -> dict:
    t = play(params, rounds)
    rep = verify_transcript(t, horizon=horizon)
    return {"seed": params.seed, "summary": t.summary(), "verification": rep.to_json(), "transcript": t}


def _batch_job(params: GameParams, rounds: int, horizon: int | None) -> dict:
    try:
        return run_game(params, rounds, horizon)
    except StrategyFailure as exc:
        t = exc.transcript
        log.error("experiment: seed %s: %s", params.seed, exc)
        rep = verify_transcript(t, horizon=horizon)
        rep.passed = False
        rep.fail("strategy", reason=str(exc))
        return {"seed": params.seed, "summary": t.summary(), "verification": rep.to_json(), "transcript": t}


def game_batch(params: GameParams, seeds: Sequence[int], rounds: int,
               workers: int | None = None, horizon: int | None = None) -> list[dict]:
    """Independent games, one per seed, merged in seed order."""
    workers = int(getattr(settings, "SYMDYN_WORKERS", 4)) if workers is None else workers
    jobs = [replace(params, seed=int(s)) for s in sorted(seeds)]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as ex:
        results = list(ex.map(lambda gp: _batch_job(gp, rounds, horizon), jobs))
    passed = sum(1 for r in results if r["verification"]["passed"])
    log.info("experiment: %s/%s games verified", passed, len(results))
    return results


def batch_report(results: list[dict]) -> dict:
    return {
        "games": len(results),
        "passed": sum(1 for r in results if r["verification"]["passed"]),
        "runs": [{"seed": r["seed"], "passed": r["verification"]["passed"],
                  "certificate_length": r["verification"]["certificate_length"],
                  "flags": r["summary"]["flags"]} for r in results],
    }
