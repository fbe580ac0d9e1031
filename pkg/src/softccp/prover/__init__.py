"""Sequent prover, process encoding and the checking harnesses."""

from .formulas import (
    Bang,
    Exists,
    Forall,
    Lolli,
    One,
    Signature,
    Special,
    Tensor,
    Top,
    With,
    from_constraint,
    tensor_all,
)
from .search import DEFAULT_DEPTH, ProofResult, ProofTree, Sequent, check_promotion, prove
