# symdyn/dynamics/__init__.py
from .circle import MarkovPartition, build_custom_partition, build_uniform_partition, cylinder
from .errors import SymdynError
from .sft import TransitionSystem, Word

__all__ = [
    "MarkovPartition",
    "SymdynError",
    "TransitionSystem",
    "Word",
    "build_custom_partition",
    "build_uniform_partition",
    "cylinder",
]
