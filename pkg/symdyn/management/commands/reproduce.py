# symdyn/management/commands/reproduce.py
from __future__ import annotations

import pathlib

from symdyn.dynamics.experiments import reproduce_examples

from ._base import SymdynCommand


class Command(SymdynCommand):
    help = "Re-run the three tree-like counterexamples with their pinned parameters."
    actions = ("examples",)

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--s-exponents", type=int, nargs="+", default=[2, 3, 4],
                            help="2^s-adic partitions for the third example")
        parser.add_argument("--gamma-1", help="override the first example's target")
        parser.add_argument("--gamma-2", help="override the second example's target")
        parser.add_argument("--report", help="plain-text report file")

    def do_examples(self, s_exponents=(2, 3, 4), gamma_1=None, gamma_2=None, report=None, **options):
        overrides = {}
        if gamma_1:
            overrides["example-1"] = gamma_1
        if gamma_2:
            overrides["example-2"] = gamma_2
        results = reproduce_examples(s_exponents, overrides)

        lines = [r.line() for r in results]
        for line in lines:
            style = self.style.SUCCESS if line.startswith("PASS") else self.style.ERROR
            self.stdout.write(style(line))
        if report:
            path = pathlib.Path(report)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")

        out = {"passed": all(r.passed for r in results), "results": [r.to_json() for r in results]}
        failed = [r.name for r in results if not r.passed]
        if failed:
            self.fail(f"{', '.join(failed)} failed", out, options.get("out"))
        return out if options.get("out") else None
