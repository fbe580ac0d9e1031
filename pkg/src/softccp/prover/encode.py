"""Processes, definitions and axioms as formulas.

A process is marked with the linear label ``p`` and a pending call with the
linear label ``d``; definitions sit under the unbounded label ``u`` and
axioms under the top of the semiring, so both may be used any number of
times.
"""

from __future__ import annotations

from .. import kernel as k
from ..kernel import Atom, Call, Definition, Local, Par, Skip, Sum, Tell, Var
from ..semiring import CSemiring
from .formulas import (
    Bang,
    Exists,
    Forall,
    Lolli,
    One,
    Special,
    Tensor,
    Top,
    With,
    from_constraint,
)
from .search import Sequent

P, D, U = Special.P, Special.D, Special.U


def encode_process(proc):
    match proc:
        case Tell(c):
            return Bang(P, from_constraint(c))
        case Sum(branches):
            arms = tuple(Lolli(from_constraint(g), encode_process(b)) for g, b in branches)
            return Bang(P, arms[0] if len(arms) == 1 else With(arms))
        case Local(x, body):
            return Bang(P, Exists(x, encode_process(body)))
        case Call(name, args):
            return Bang(D, Atom(name, tuple(args)))
        case Par(l, r):
            return Tensor(encode_process(l), encode_process(r))
        case Skip():
            return One()
    raise TypeError(f"not a process: {proc!r}")


def encode_definition(d: Definition):
    body = Lolli(Bang(D, Atom(d.name, tuple(Var(x) for x in d.params))), encode_process(d.body))
    for x in reversed(d.params):
        body = Forall(x, body)
    return Bang(U, body)


def encode_axiom(ax: k.Axiom, s: CSemiring):
    body = Lolli(from_constraint(ax.premise), from_constraint(ax.conclusion))
    for x in reversed(ax.vars):
        body = Forall(x, body)
    return Bang(s.top, body)


def encode(x, s: CSemiring | None = None):
    """Encode a process, a definition, an axiom (needs ``s``) or a constraint."""
    match x:
        case Definition():
            return encode_definition(x)
        case k.Axiom():
            if s is None:
                raise ValueError("encoding an axiom needs the semiring")
            return encode_axiom(x, s)
        case k.One() | k.Tensor() | k.Exists() | k.Soft():
            return from_constraint(x)
    return encode_process(x)


def theory(axioms, defs, s: CSemiring) -> tuple:
    return tuple(encode_axiom(a, s) for a in axioms) + tuple(encode_definition(d) for d in defs)


def entailment_sequent(store_constraint: k.Constraint, goal: k.Constraint, axioms, s: CSemiring) -> Sequent:
    """``axioms, [[store]] --> [[goal]]``."""
    ctx = theory(axioms, (), s) + (from_constraint(store_constraint),)
    return Sequent(ctx, from_constraint(goal))


def adequacy_sequent(program, goal: k.Constraint) -> Sequent:
    """Theory, definitions and the main process on the left; ``goal * top`` on the right."""
    ctx = theory(program.axioms, program.defs, program.semiring) + (encode_process(program.main),)
    return Sequent(ctx, Tensor(from_constraint(goal), Top()))


__all__ = [
    "encode",
    "encode_process",
    "encode_definition",
    "encode_axiom",
    "theory",
    "entailment_sequent",
    "adequacy_sequent",
]
