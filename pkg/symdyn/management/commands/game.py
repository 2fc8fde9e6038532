# symdyn/management/commands/game.py
from __future__ import annotations

import pathlib

from symdyn.dynamics import codec
from symdyn.dynamics.errors import InputError, StrategyFailure
from symdyn.dynamics.experiments import batch_report, game_batch, load_config, run_game
from symdyn.dynamics.game import BLACK_STRATEGIES, GameParams, play, verify_transcript, winning_ratio
from symdyn.dynamics.game.core import BLACK
from symdyn.models import GameRun, StoredPartition

from ._base import EXIT_DEFECT, SymdynCommand, default_seed, load_partition


class Command(SymdynCommand):
    help = "Play, verify or batch-run Schmidt games on a Markov partition."
    actions = ("play", "verify", "batch")

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--config", help="experiment config JSON with a 'game' section")
        parser.add_argument("--partition")
        parser.add_argument("--x0")
        parser.add_argument("--black-ratio", help="Black's ratio m (default 1/2)")
        parser.add_argument("--white-ratio", help="White's ratio n (default: the winning ratio)")
        parser.add_argument("--black-strategy", choices=BLACK_STRATEGIES)
        parser.add_argument("--initial-radius")
        parser.add_argument("--targets-mode", choices=("all", "single"))
        parser.add_argument("--seed", type=int)
        parser.add_argument("--rounds", type=int)
        parser.add_argument("--adversary", help="transcript whose Black centers adversarial-replay follows")
        parser.add_argument("--jitter", default="0")
        parser.add_argument("--transcript", help="play: JSONL output; verify: JSONL input")
        parser.add_argument("--replay", help="replay a stored transcript and compare it line by line")
        parser.add_argument("--save", action="store_true", help="persist the run as a GameRun")
        parser.add_argument("--name", help="stored partition name used with --save")
        parser.add_argument("--horizon", type=int)
        parser.add_argument("--seeds", help="batch: comma separated seeds")
        parser.add_argument("--count", type=int, help="batch: this many seeds starting at --seed")
        parser.add_argument("--workers", type=int)
        parser.add_argument("--transcripts", help="batch: directory for one JSONL transcript per seed")

    # ------------------------------------------------------------------
    def _params(self, options) -> tuple[GameParams, int, list[int]]:
        if options.get("config"):
            cfg = load_config(pathlib.Path(options["config"]))
            data = dict(cfg.game)
            if cfg.seeds and "seed" not in data:
                data["seed"] = cfg.seeds[0]
            p, rounds, seeds = cfg.partition, cfg.rounds, cfg.seeds
        else:
            data, p, rounds, seeds = {}, load_partition(options.get("partition")), 60, []
        flags = {
            "x0": options.get("x0"),
            "black_ratio": options.get("black_ratio"),
            "white_ratio": options.get("white_ratio"),
            "black_strategy": options.get("black_strategy"),
            "initial_radius": options.get("initial_radius"),
            "targets_mode": options.get("targets_mode"),
            "seed": options.get("seed"),
        }
        data.update({k: v for k, v in flags.items() if v is not None})
        if "x0" not in data:
            raise InputError("--x0 is required")
        data.setdefault("seed", default_seed())
        data.setdefault("black_ratio", "1/2")
        if "white_ratio" not in data:
            data["white_ratio"] = codec.rational(winning_ratio(p))
        if options.get("adversary"):
            data["black_strategy"] = "adversarial-replay"
            data["recorded"] = [codec.rational(mv.ball.center)
                                for mv in codec.read_moves(options["adversary"]) if mv.player == BLACK]
            data["jitter"] = options.get("jitter") or "0"
        rounds = options.get("rounds") or rounds
        return codec.params_from_json(data, partition=p), rounds, seeds

    def _save(self, result: dict, name: str | None) -> int:
        stored = None
        if name:
            p = result["transcript"].params.partition
            stored, _ = StoredPartition.objects.get_or_create(
                name=name, defaults={"definition": p.to_json(), "size": p.size},
            )
        return GameRun.record(result, partition=stored).pk

    # ------------------------------------------------------------------
    def do_play(self, **options):
        if options.get("replay"):
            return self._replay(options["replay"], options.get("out"))
        params, rounds, _ = self._params(options)
        out = options.get("out")
        try:
            result = run_game(params, rounds, options.get("horizon"))
        except StrategyFailure as exc:
            t = exc.transcript
            if options.get("transcript"):
                codec.write_transcript(t, options["transcript"])
            self.fail(f"strategy failure: {exc}", {"summary": t.summary()}, out)

        t = result["transcript"]
        if options.get("transcript"):
            codec.write_transcript(t, options["transcript"], {"verification": result["verification"]})
        report = {"summary": result["summary"], "verification": result["verification"]}
        if options.get("save"):
            report["game_run"] = self._save(result, options.get("name"))

        if not result["verification"]["passed"]:
            if t.out_of_theorem:
                self.stderr.write(self.style.WARNING("warning: out-of-theorem parameters; verification failed"))
                return report
            self.fail("verification failed", report, out)
        return report

    def _replay(self, path: str, out: str | None) -> dict:
        stored = codec.load_transcript(path)
        rounds = max((mv.turn for mv in stored.moves), default=0)
        try:
            again = play(stored.params, rounds)
        except StrategyFailure as exc:
            again = exc.transcript
        old = pathlib.Path(path).read_text(encoding="utf-8").splitlines()
        new = codec.transcript_lines(again)
        report = {"replay": path, "moves": len(new), "identical": old == new}
        if old != new:
            k = next((i for i, (a, b) in enumerate(zip(old, new)) if a != b), min(len(old), len(new)))
            report["first_difference"] = {"line": k + 1,
                                          "stored": old[k] if k < len(old) else None,
                                          "replayed": new[k] if k < len(new) else None}
            self.fail("replay differs from the stored transcript", report, out, EXIT_DEFECT)
        return report

    def do_verify(self, transcript=None, horizon=None, x0=None, partition=None, **options):
        if not transcript:
            raise InputError("--transcript is required")
        t = codec.load_transcript(transcript)
        p = load_partition(partition) if partition else None
        rep = verify_transcript(t, p=p, x0=x0, horizon=horizon)
        report = {"transcript": transcript, "verification": rep.to_json(),
                  "out_of_theorem": t.out_of_theorem}
        if not rep.passed and not t.out_of_theorem:
            self.fail("verification failed", report, options.get("out"))
        return report

    def do_batch(self, **options):
        params, rounds, seeds = self._params(options)
        if options.get("seeds"):
            seeds = [int(s) for s in options["seeds"].split(",") if s.strip()]
        elif not seeds:
            seeds = list(range(params.seed, params.seed + (options.get("count") or 10)))
        results = game_batch(params, seeds, rounds, options.get("workers"), options.get("horizon"))
        if options.get("transcripts"):
            folder = pathlib.Path(options["transcripts"])
            for r in results:
                codec.write_transcript(r["transcript"], folder / f"seed-{r['seed']}.jsonl",
                                       {"verification": r["verification"]})
        report = batch_report(results)
        alarms = [r["seed"] for r in results
                  if not r["verification"]["passed"] and not r["summary"]["flags"]["out_of_theorem"]]
        if alarms:
            self.fail(f"{len(alarms)} in-theorem games failed verification (seeds {alarms[:5]})",
                      report, options.get("out"))
        return report
