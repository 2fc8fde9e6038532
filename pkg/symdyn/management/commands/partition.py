# symdyn/management/commands/partition.py
from __future__ import annotations

from symdyn.dynamics.circle import _fmt, boundary_ops, distortion, frac, representations_of
from symdyn.dynamics.sft import classify_letters
from symdyn.dynamics.game import winning_ratio

from ._base import SymdynCommand, load_partition


class Command(SymdynCommand):
    help = "Validate a Markov partition file or show its structure (python manage.py partition validate --partition f.json)."
    actions = ("validate", "show")

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--partition", required=True)
        parser.add_argument("--x", help="point whose representations and boundary weight to show")
        parser.add_argument("--depth", type=int, default=4)
        parser.add_argument("--q", type=int, default=0, help="also report ε(q) and 𝓔(q)")

    def do_validate(self, partition, **_):
        p = load_partition(partition)
        return {
            "valid": True,
            "size": p.size,
            "uniform": p.is_uniform,
            "endpoint_tolerant": p.endpoint_tolerant,
            "r": _fmt(p.r),
            "lambda": _fmt(p.lam),
            "delta_T": _fmt(p.delta_T),
            "C": _fmt(p.C),
            "max_diameter": _fmt(p.max_diameter),
            "degenerate_letters": list(classify_letters(p.ts).degenerate_letters),
        }

    def do_show(self, partition, x=None, depth=4, q=0, **_):
        p = load_partition(partition)
        out = {
            "definition": p.to_json(),
            "elements": [
                {"letter": i, "lo": _fmt(p.element(i)[0]), "hi": _fmt(p.element(i)[1]),
                 "measure": _fmt(p.measure(i))}
                for i in p.ts.letters
            ],
            "transitions": p.ts.to_json(),
            "winning_ratio": _fmt(winning_ratio(p)),
        }
        if q > 0:
            prof = distortion(p)
            out["distortion"] = {"q": q, "eps": _fmt(prof.eps(q)), "Eps": _fmt(prof.Eps(q))}
        if x is not None:
            pt = frac(x) % 1
            rep = representations_of(p, pt, depth)
            bops = boundary_ops(p)
            out["point"] = {
                "x": _fmt(pt),
                "depth": depth,
                "representations": [w.format(p.size) for w in rep.words],
                "weight": bops.weight(pt),
                "adjacency": [
                    {"word": c.word.format(p.size), "lo": _fmt(c.lo), "hi": _fmt(c.hi)}
                    for c in bops.adjacency_set(pt, depth)
                ],
            }
        return out
