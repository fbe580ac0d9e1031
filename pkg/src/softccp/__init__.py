"""Soft concurrent constraint programming: interpreter, entailment and prover."""

from .semiring import CRISP, FUZZY, PROB, WEIGHTED, CSemiring, Value, get_semiring
from .store import Mode, Store, add, best_level, entails, store_of

__version__ = "0.1.0"
