# symdyn/tests/test_commands.py
import io
import json
import pathlib
import tempfile

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from symdyn.models import GameRun

from .fixtures import DYADIC, GAMMA, NOT_MARKOV, SKEWED, write


def run(*args) -> dict:
    out = io.StringIO()
    call_command(*args, stdout=out, stderr=io.StringIO())
    return json.loads(out.getvalue())


class CommandTestCase(TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = pathlib.Path(self._tmp.name)
        self.dyadic = write(self.tmp, "dyadic.json", DYADIC)

    def tearDown(self):
        self._tmp.cleanup()

    def assertExits(self, code: int, *args):
        with self.assertRaises(CommandError) as cm:
            call_command(*args, stdout=io.StringIO(), stderr=io.StringIO())
        self.assertEqual(cm.exception.returncode, code, str(cm.exception))
        return cm.exception


class PartitionCommandTests(CommandTestCase):
    def test_validate(self):
        report = run("partition", "validate", "--partition", self.dyadic)
        self.assertTrue(report["valid"])
        self.assertEqual((report["size"], report["r"]), (2, "1/1"))
        self.assertIn("created", report)

    def test_not_markov_is_an_input_error(self):
        path = write(self.tmp, "bad.json", NOT_MARKOV)
        err = self.assertExits(1, "partition", "validate", "--partition", path)
        self.assertIn("(5)", str(err))

    def test_missing_file(self):
        self.assertExits(1, "partition", "validate", "--partition", str(self.tmp / "nope.json"))

    def test_show_a_point(self):
        report = run("partition", "show", "--partition", self.dyadic, "--x", "1/3", "--depth", "2", "--q", "3")
        self.assertEqual(report["point"]["representations"], ["121"])
        self.assertIsNone(report["point"]["weight"])
        self.assertEqual(report["distortion"], {"q": 3, "eps": "1/8", "Eps": "1/8"})
        self.assertEqual(report["winning_ratio"], "1/64")


class WordsCommandTests(CommandTestCase):
    def test_enumerate(self):
        report = run("words", "enumerate", "--matrix", "[[1,1],[1,0]]", "--length", "2")
        self.assertEqual(report["count"], 5)
        self.assertEqual(report["words"], ["111", "112", "121", "211", "212"])

    def test_enumerate_needs_a_system(self):
        self.assertExits(1, "words", "enumerate", "--length", "2")
        self.assertExits(1, "words", "enumerate", "--matrix", "[[1,1]", "--length", "2")

    def test_extend(self):
        report = run("words", "extend", "--shift", "2", "--gamma", GAMMA, "--alpha", "1" * 12 + "2")
        self.assertEqual((report["case"], report["extension"]), ("2", "21"))
        self.assertTrue(report["oracle"]["passed"])

    def test_exceptional_target_is_reported(self):
        report = run("words", "extend", "--shift", "2", "--gamma", "1" * 12 + "2", "--alpha", "2" * 13)
        self.assertEqual(report["exceptional"], ["1" * 12 + "2"])


class OracleCommandTests(CommandTestCase):
    def test_count(self):
        report = run("oracle", "count", "--shift", "2", "--gamma", "11", "--max-n", "4")
        self.assertEqual(report["counts"], [2, 3, 5, 8, 13])

    def test_dim(self):
        report = run("oracle", "dim", "--partition", self.dyadic, "--gamma", "11")
        self.assertAlmostEqual(report["dimension"], 0.6942419136, places=6)

    def test_dim_on_a_non_uniform_partition(self):
        path = write(self.tmp, "skewed.json", SKEWED)
        self.assertExits(1, "oracle", "dim", "--partition", path, "--gamma", "11")

    def test_targets_are_required(self):
        self.assertExits(1, "oracle", "count", "--shift", "2")


class AvoidCommandTests(CommandTestCase):
    def test_build(self):
        report = run("avoid", "build", "--partition", self.dyadic, "--gamma", "211", "--q", "2",
                     "--k-max", "3", "--explicit", "--certify")
        self.assertEqual(report["diameters"], ["1/8", "1/32", "1/128"])
        self.assertEqual(len(report["levels"]), 3)
        self.assertTrue(report["orbits_avoid_targets"])
        self.assertIsNone(report["death_level"])

    def test_bound(self):
        report = run("avoid", "bound", "--partition", self.dyadic, "--gamma", "11111", "--q", "4",
                     "--k-max", "9", "--variant", "urbanski", "--k", "8", "--floor", "1/2")
        self.assertAlmostEqual(report["bound"], 25 / 33, places=9)

    def test_collection_death_exits_cleanly(self):
        report = run("avoid", "bound", "--partition", self.dyadic, "--q", "1", "--k-max", "2",
                     "--gamma", "11", "--gamma", "12", "--gamma", "21", "--gamma", "22")
        self.assertEqual(report["collection_death"], 1)

    def test_config_writes_the_table(self):
        csv_path = self.tmp / "hd.csv"
        cfg = write(self.tmp, "exp.json", {"partition": "dyadic.json", "targets": ["211"], "q": 2, "k_max": 2})
        report = run("avoid", "bound", "--config", cfg, "--csv", str(csv_path))
        self.assertEqual(report["rows"], 2)
        self.assertTrue(csv_path.exists())
        self.assertTrue(csv_path.with_suffix(".json").exists())


class GameCommandTests(CommandTestCase):
    def play_args(self, *extra):
        return ("game", "play", "--partition", self.dyadic, "--x0", "1/3", "--white-ratio", "1/64", *extra)

    def test_play_verify_and_replay(self):
        transcript = str(self.tmp / "game.jsonl")
        report = run(*self.play_args("--rounds", "24", "--transcript", transcript, "--horizon", "100", "--save"))
        self.assertTrue(report["verification"]["passed"])
        self.assertEqual(GameRun.objects.get(pk=report["game_run"]).passed, True)

        checked = run("game", "verify", "--transcript", transcript, "--horizon", "100")
        self.assertTrue(checked["verification"]["passed"])

        again = run("game", "play", "--replay", transcript)
        self.assertTrue(again["identical"])

    def test_edited_transcript_fails_replay(self):
        transcript = self.tmp / "short.jsonl"
        self.assertExits(2, *self.play_args("--rounds", "3", "--transcript", str(transcript)))
        lines = transcript.read_text(encoding="utf-8").splitlines()
        move = json.loads(lines[0])
        move["center"] = "1/7"
        lines[0] = json.dumps(move, sort_keys=True)
        transcript.write_text("\n".join(lines) + "\n", encoding="utf-8")
        self.assertExits(3, "game", "play", "--replay", str(transcript))

    def test_short_game_fails_verification(self):
        self.assertExits(2, *self.play_args("--rounds", "6"))

    def test_out_of_theorem_game_exits_cleanly(self):
        report = run("game", "play", "--partition", self.dyadic, "--x0", "1/3", "--white-ratio", "1/2",
                     "--rounds", "6")
        self.assertTrue(report["summary"]["flags"]["out_of_theorem"])

    def test_batch_reports_failures(self):
        self.assertExits(2, *("game", "batch", "--partition", self.dyadic, "--x0", "1/3",
                              "--white-ratio", "1/64", "--rounds", "3", "--seeds", "1,2"))

    def test_x0_is_required(self):
        self.assertExits(1, "game", "play", "--partition", self.dyadic)

    def test_verify_missing_transcript(self):
        self.assertExits(1, "game", "verify", "--transcript", str(self.tmp / "none.jsonl"))


class ReproduceCommandTests(CommandTestCase):
    def test_examples(self):
        out = io.StringIO()
        report = self.tmp / "report.txt"
        call_command("reproduce", "examples", "--s-exponents", "2", "--report", str(report), stdout=out)
        self.assertIn("PASS example-1", out.getvalue())
        self.assertEqual(len(report.read_text(encoding="utf-8").splitlines()), 3)
