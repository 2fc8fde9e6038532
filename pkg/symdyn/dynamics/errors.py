# symdyn/dynamics/errors.py
from __future__ import annotations


class SymdynError(Exception):
    """Base class; ``exit_code`` is what the management commands return."""

    exit_code: int = 3


class InputError(SymdynError, ValueError):
    exit_code = 1


class PartitionValidationError(InputError):
    """A Markov-partition property failed; ``prop`` names it, ``witness`` is the offending interval."""

    def __init__(self, prop: str, message: str, witness=None):
        self.prop = prop
        self.witness = witness
        super().__init__(f"property {prop}: {message}")


class UnsupportedError(InputError):
    pass


class ResourceError(SymdynError):
    exit_code = 1


class CollectionDeathError(SymdynError):
    """Some level density vanished; the collection has no dimension bound."""

    exit_code = 0

    def __init__(self, level: int, message: str = ""):
        self.level = level
        super().__init__(message or f"collection dies at level {level}")


class StrategyFailure(SymdynError):
    exit_code = 2

    def __init__(self, turn: int, message: str):
        self.turn = turn
        super().__init__(f"turn {turn}: {message}")


class DefectError(SymdynError):
    exit_code = 3
