# symdyn/management/commands/words.py
from __future__ import annotations

import logging

from symdyn.dynamics.errors import InputError
from symdyn.dynamics.matching import (
    continuation_oracle,
    detect_exceptional,
    no_matching_extend,
    non_extendable_witnesses,
    serial_extend,
)
from symdyn.dynamics.sft import Word, count_words, enumerate_words

from ._base import (
    EXIT_DEFECT,
    SymdynCommand,
    add_system_arguments,
    add_target_arguments,
    transition_system,
    words,
)

log = logging.getLogger("symdyn.commands")


class Command(SymdynCommand):
    help = "Enumerate valid words, or extend α away from every target match."
    actions = ("enumerate", "extend")

    def add_arguments(self, parser):
        super().add_arguments(parser)
        add_system_arguments(parser)
        add_target_arguments(parser)
        parser.add_argument("--length", type=int, help="enumerate Σ(n): words of n+1 letters")
        parser.add_argument("--prefix", default="")
        parser.add_argument("--count-only", action="store_true")
        parser.add_argument("--alpha", help="word to extend")
        parser.add_argument("--witnesses", action="store_true",
                            help="for an exceptional γ, search every (b⁰, b¹) for a completing continuation")

    def do_enumerate(self, length=None, prefix="", count_only=False, **options):
        ts = transition_system(options)
        if length is None:
            raise InputError("--length is required")
        pre = Word.parse(prefix) if prefix else None
        total = count_words(ts, length, pre)
        out = {"length": length, "prefix": prefix, "count": total}
        if not count_only:
            out["words"] = [w.format(ts.size) for w in enumerate_words(ts, length, pre)]
        return out

    def do_extend(self, alpha=None, witnesses=False, **options):
        ts = transition_system(options)
        gammas = words(options)
        if not alpha:
            raise InputError("--alpha is required")
        a = Word.parse(alpha)

        forms = {g.format(ts.size): detect_exceptional(ts, g) for g in gammas}
        exceptional = [name for name, f in forms.items() if f.is_exceptional]
        if exceptional:
            out = {"alpha": a.format(ts.size), "exceptional": exceptional}
            if witnesses and len(gammas) == 1:
                out["witnesses"] = non_extendable_witnesses(ts, gammas[0], a)
            return out

        if len(gammas) == 1:
            pair = no_matching_extend(ts, gammas[0], a)
            ext = pair.word
            out = {"b0": pair.b0.format(ts.size), "b1": pair.b1.format(ts.size),
                   "case": pair.case, "deflected": pair.deflected}
        else:
            serial = serial_extend(ts, gammas, a)
            ext = serial.extension
            out = {"pieces": [{"target": idx, "b0": pr.b0.format(ts.size), "b1": pr.b1.format(ts.size),
                               "case": pr.case} for idx, pr in serial.pieces]}
            out["heads"] = list(serial.heads)
        check = continuation_oracle(ts, gammas, a, ext.letters)
        out.update({
            "alpha": a.format(ts.size),
            "extension": ext.format(ts.size),
            "oracle": {"passed": check.passed, "checked_to": check.checked_to,
                       "counterexample": check.counterexample.format(ts.size) if check.counterexample else None},
        })
        if not check.passed:
            log.error("words: extension %s of %s fails the continuation oracle", ext, a)
            self.fail("extension fails the continuation oracle", out, options.get("out"), EXIT_DEFECT)
        return out
