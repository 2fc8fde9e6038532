# symdyn/management/commands/oracle.py
from __future__ import annotations

from symdyn.dynamics.circle import _fmt
from symdyn.dynamics.errors import InputError
from symdyn.dynamics.oracle import avoiding_counts, spectral_dimension

from ._base import SymdynCommand, add_system_arguments, add_target_arguments, load_partition, transition_system, words


class Command(SymdynCommand):
    help = "Count target-avoiding words and compute the spectral dimension of the avoiding set."
    actions = ("count", "dim")

    def add_arguments(self, parser):
        super().add_arguments(parser)
        add_system_arguments(parser)
        add_target_arguments(parser)
        parser.add_argument("--max-n", type=int, default=10)
        parser.add_argument("--no-cross-check", action="store_true")

    def do_count(self, max_n=10, no_cross_check=False, **options):
        ts = transition_system(options)
        gammas = words(options)
        if max_n < 0:
            raise InputError("--max-n must be non-negative")
        counts = avoiding_counts(ts, gammas, max_n, cross_check=not no_cross_check)
        return {"targets": [g.format(ts.size) for g in gammas], "counts": counts}

    def do_dim(self, **options):
        p = load_partition(options.get("partition"))
        gammas = words(options)
        res = spectral_dimension(p, gammas)
        return {
            "targets": [g.format(p.size) for g in gammas],
            "dimension": res.dimension,
            "dimension_interval": list(res.dimension_interval),
            "rho_interval": [_fmt(res.rho_interval[0]), _fmt(res.rho_interval[1])],
            "components": res.components,
            "iterations": res.iterations,
        }
