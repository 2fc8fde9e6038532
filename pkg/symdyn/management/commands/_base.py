# symdyn/management/commands/_base.py
"""
Shared plumbing for the symdyn management commands: a positional action,
input loading, JSON emission and the exit-code mapping

    0  success (including expected negatives such as collection death)
    1  input error
    2  strategy failure / failed mathematical check
    3  internal defect
"""
from __future__ import annotations

import json
import logging
import pathlib
from typing import Any

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from django.utils import timezone

from symdyn.dynamics import codec
from symdyn.dynamics.errors import (
    CollectionDeathError,
    InputError,
    PartitionValidationError,
    SymdynError,
)
from symdyn.dynamics.sft import TransitionSystem, Word

log = logging.getLogger("symdyn.commands")

EXIT_INPUT, EXIT_FAILURE, EXIT_DEFECT = 1, 2, 3


class SymdynCommand(BaseCommand):
    actions: tuple[str, ...] = ()

    def add_arguments(self, parser):
        parser.add_argument("action", choices=self.actions)
        parser.add_argument("--out", help="write the JSON report here instead of stdout")

    # subclasses implement one method per action: do_<action>(**options) -> dict
    def handle(self, *args, **options):
        action = options["action"]
        method = getattr(self, "do_" + action.replace("-", "_"))
        try:
            report = method(**options)
        except CollectionDeathError as exc:
            self.stderr.write(self.style.WARNING(f"warning: {exc}"))
            report = {"collection_death": exc.level, "detail": str(exc)}
        except PartitionValidationError as exc:
            witness = [str(x) for x in exc.witness] if exc.witness is not None else None
            raise CommandError(f"{exc} (witness {witness})", returncode=EXIT_INPUT) from exc
        except SymdynError as exc:
            raise CommandError(str(exc), returncode=exc.exit_code) from exc
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise CommandError(f"bad input: {exc}", returncode=EXIT_INPUT) from exc
        except CommandError:
            raise
        except Exception as exc:
            log.exception("%s %s failed", self.__module__.rsplit(".", 1)[-1], action)
            raise CommandError(f"internal error: {exc}", returncode=EXIT_DEFECT) from exc
        if report is not None:
            self.emit(report, options.get("out"))

    def emit(self, report: Any, out: str | None = None) -> None:
        if isinstance(report, dict):
            report = {**report, "created": timezone.now().isoformat()}
        if out:
            codec.write_json(out, report)
            self.stdout.write(f"wrote {out}")
        else:
            self.stdout.write(codec.dumps(report))

    def fail(self, message: str, report: Any = None, out: str | None = None, code: int = EXIT_FAILURE):
        if report is not None:
            self.emit(report, out)
        raise CommandError(message, returncode=code)


# ----------------------------------------------------------------------------
# Shared options
# ----------------------------------------------------------------------------
def add_system_arguments(parser) -> None:
    src = parser.add_mutually_exclusive_group()
    src.add_argument("--partition", help="partition JSON file")
    src.add_argument("--shift", type=int, help="full shift on this many letters")
    src.add_argument("--matrix", help='transition matrix as JSON, e.g. "[[1,1],[1,0]]"')


def add_target_arguments(parser) -> None:
    parser.add_argument("--gamma", action="append", default=[], help="target word (repeatable)")


def load_partition(path: str | None):
    if not path:
        raise InputError("--partition is required")
    return codec.load_partition(pathlib.Path(path))


def transition_system(options: dict) -> TransitionSystem:
    if options.get("partition"):
        return load_partition(options["partition"]).ts
    if options.get("shift"):
        return TransitionSystem.full_shift(int(options["shift"]))
    if options.get("matrix"):
        try:
            return TransitionSystem.from_matrix(json.loads(options["matrix"]))
        except json.JSONDecodeError as exc:
            raise InputError(f"--matrix is not JSON ({exc})") from exc
    raise InputError("one of --partition, --shift or --matrix is required")


def words(options: dict, key: str = "gamma") -> list[Word]:
    out = [Word.parse(w) for w in options.get(key) or []]
    if not out:
        raise InputError(f"at least one --{key} is required")
    return out


def default_seed() -> int:
    return int(getattr(settings, "SYMDYN_DEFAULT_SEED", 7))
