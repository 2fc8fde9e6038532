# symdyn/management/commands/avoid.py
from __future__ import annotations

import pathlib

from symdyn.dynamics.circle import _fmt, frac
from symdyn.dynamics.errors import InputError
from symdyn.dynamics.experiments import ExperimentConfig, hd_experiment, load_config, write_hd_experiment
from symdyn.dynamics.treelike import (
    VARIANTS,
    build_levels,
    certify_avoidance,
    density_and_delta,
    hd_lower_bound,
    structure_report,
)

from ._base import SymdynCommand, add_target_arguments, load_partition, words


class Command(SymdynCommand):
    help = "Build tree-like avoidance collections E_k, their densities Δ_k, and the dimension lower bound."
    actions = ("build", "density", "bound")

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--config", help="experiment config JSON (replaces the flags below)")
        parser.add_argument("--partition")
        add_target_arguments(parser)
        parser.add_argument("--q", type=int)
        parser.add_argument("--k-max", type=int, default=3)
        parser.add_argument("--variant", choices=VARIANTS, default=VARIANTS[0])
        parser.add_argument("--first-letter", type=int)
        parser.add_argument("--explicit", action="store_true", help="materialize every level word")
        parser.add_argument("--certify", action="store_true", help="check midpoint orbits of the deepest level")
        parser.add_argument("--k", type=int, default=1)
        parser.add_argument("--floor", help="density floor substituted for every Δ_j")
        parser.add_argument("--csv", help="bound: write the per-k table here")

    def _config(self, options) -> ExperimentConfig:
        if options.get("config"):
            cfg = load_config(pathlib.Path(options["config"]))
            if not cfg.q and cfg.gammas:
                cfg.q = len(cfg.gammas[0]) - 1
            return cfg
        gammas = words(options)
        return ExperimentConfig(
            partition=load_partition(options.get("partition")),
            gammas=gammas,
            q=options.get("q") or len(gammas[0]) - 1,
            k_max=options["k_max"],
            variant=options["variant"],
            first_letter=options.get("first_letter"),
        )

    def _collection(self, cfg: ExperimentConfig, explicit: bool):
        if cfg.q < 1:
            raise InputError("q must be at least 1")
        return build_levels(cfg.partition, cfg.gammas, cfg.q, cfg.k_max, cfg.variant,
                            cfg.first_letter, True if explicit else None)

    def do_build(self, explicit=False, certify=False, **options):
        cfg = self._config(options)
        tc = self._collection(cfg, explicit)
        size = cfg.partition.size
        out = {
            "variant": cfg.variant,
            "q": cfg.q,
            "k_max": cfg.k_max,
            "counts": tc.counts,
            "diameters": [_fmt(d) for d in tc.diams],
            "deltas": [_fmt(d) for d in tc.deltas],
            "death_level": tc.death_level,
            "structure": structure_report(tc),
        }
        if tc.levels is not None and cfg.k_max * cfg.q + 1 <= 12:
            out["levels"] = [[w.format(size) for w in tc.level_words(k)] for k in range(1, cfg.k_max + 1)]
        if certify:
            out["orbits_avoid_targets"] = certify_avoidance(tc, cfg.partition)
        if tc.death_level is not None:
            self.stderr.write(self.style.WARNING(f"warning: collection dies at level {tc.death_level}"))
        return out

    def do_density(self, explicit=False, k=1, **options):
        cfg = self._config(options)
        tc = self._collection(cfg, explicit)
        rep = density_and_delta(tc, k)
        return {
            "k": k,
            "delta": _fmt(rep.delta),
            "densities": {name: _fmt(d) for name, d in sorted(rep.densities.items())},
            "witnesses": [w.format(cfg.partition.size) for w in rep.witnesses],
        }

    def do_bound(self, explicit=False, k=1, floor=None, csv=None, **options):
        cfg = self._config(options)
        csv = csv or (str(cfg.output) if cfg.output else None)
        if csv or options.get("config"):
            exp = hd_experiment(cfg)
            json_path = pathlib.Path(csv).with_suffix(".json") if csv else None
            if csv:
                write_hd_experiment(exp, csv, json_path)
            return {"rows": len(exp.rows), "csv": csv, "summary": exp.summary}
        tc = self._collection(cfg, explicit)
        bound = hd_lower_bound(tc, k, frac(floor) if floor else None)
        return {"k": k, "bound": float(bound), "bound_exact": _fmt(bound), "floor": floor}
