"""Checks that pit the prover against the other components and against itself.

* ``adequacy_check``: operational barbs against provability of the encoding.
* ``cut_check``: a sequent provable with one cut is provable without it.
* ``nonprovability_suite``: process encodings never help to prove a
  constraint, and definitions can always be dropped.
* ``differential_instances`` / ``differential_check``: the store's
  entailment procedure against the prover on random constraint sequents.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field

from .. import kernel as k
from ..interpreter import DEFAULT_MAX_STEPS, Program, barb
from ..kernel import Atom, Axiom, Call, Const, Definition, Local, Soft, Sum, Tell, Var
from ..semiring import CSemiring, Value
from ..store import Mode, entails, store_of
from .encode import adequacy_sequent, encode_axiom, encode_definition, encode_process
from .formulas import Bang, Lolli, One, Signature, Special, Tensor, Top, With, from_constraint
from .search import DEFAULT_DEPTH, Sequent, prove
from .validate import validate

# ---------------------------------------------------------------------------
# adequacy


@dataclass(frozen=True)
class AdequacyResult:
    barb: bool
    provable: bool
    barb_truncated: bool
    prover_truncated: bool

    @property
    def agree(self) -> bool:
        return self.barb == self.provable

    @property
    def inconclusive(self) -> bool:
        return self.barb_truncated and self.prover_truncated

    @property
    def conclusive(self) -> bool:
        """Both verdicts are final: found, or exhausted without truncation."""
        return (self.barb or not self.barb_truncated) and (self.provable or not self.prover_truncated)


def adequacy_check(program: Program, c: k.Constraint, depth: int = DEFAULT_DEPTH,
                   max_steps: int = DEFAULT_MAX_STEPS) -> AdequacyResult:
    b = barb(program, c, max_steps)
    seq = adequacy_sequent(program, c)
    sig = Signature(program.semiring)
    r = prove(seq, sig, program.mode, depth)
    if r.proof is not None:
        validate(r.proof, sig, program.mode, seq.context, seq.goal)
    return AdequacyResult(b.found, r.found, b.truncated and not b.found, r.truncated)


# ---------------------------------------------------------------------------
# cut admissibility


@dataclass(frozen=True)
class CutCheck:
    premises_provable: bool
    cut_free: bool
    truncated: bool

    @property
    def ok(self) -> bool:
        return not self.premises_provable or self.cut_free

    @property
    def inconclusive(self) -> bool:
        return self.premises_provable and not self.cut_free and self.truncated

    def __bool__(self) -> bool:
        return self.ok


def _valid_split(context, left, right, sig: Signature) -> bool:
    """``left + right`` is ``context``, except that unbounded bangs may be shared."""
    def linear(fs):
        return Counter(f for f in fs if not (isinstance(f, Bang) and sig.unbounded(f.index)))

    def shared(fs):
        return {f for f in fs if isinstance(f, Bang) and sig.unbounded(f.index)}

    return (linear(left) + linear(right) == linear(context)
            and shared(left) | shared(right) <= shared(context))


def cut_check(seq: Sequent, cut_formula, split, sig: Signature, mode: Mode,
              depth: int = DEFAULT_DEPTH, extra: int = 4) -> CutCheck:
    """``split = (left, right)``: premises ``left --> A`` and ``right, A --> G``."""
    left, right = (tuple(x) for x in split)
    if not _valid_split(seq.context, left, right, sig):
        raise ValueError("split does not partition the context")
    p1 = prove(Sequent(left, cut_formula), sig, mode, depth)
    p2 = prove(Sequent(right + (cut_formula,), seq.goal), sig, mode, depth) if p1 else None
    if not (p1 and p2):
        return CutCheck(False, False, False)
    r = prove(seq, sig, mode, depth + extra)
    if r.proof is not None:
        validate(r.proof, sig, mode, seq.context, seq.goal)
    return CutCheck(True, r.found, r.truncated)


def _levels(s: CSemiring) -> list:
    match s.name:
        case "crisp":
            return [s.top, s.bottom]
        case "weighted":
            return [s.value(x) for x in ("0", "-1", "-2", "-5", "-7", "-inf")]
    return [s.value(x) for x in ("0", "0.1", "0.2", "0.5", "0.7", "1")]


def _random_formula(rng: random.Random, levels, atoms, size: int):
    if size <= 1:
        roll = rng.random()
        if roll < 0.1:
            return One()
        a = rng.choice(atoms)
        return Bang(rng.choice(levels), a) if roll < 0.6 else a
    op = rng.choice(["tensor", "tensor", "bang", "bang", "lolli", "with"])
    if op == "bang":
        return Bang(rng.choice(levels), _random_formula(rng, levels, atoms, size - 1))
    n = rng.randint(1, size - 1)
    l = _random_formula(rng, levels, atoms, n)
    r = _random_formula(rng, levels, atoms, size - n)
    return {"tensor": Tensor, "lolli": Lolli}.get(op, lambda x, y: With((x, y)))(l, r)


def generate_cut_instances(s: CSemiring, mode: Mode, n: int, seed: int = 0, depth: int = 6,
                           max_tries: int = 200000):
    """Sequents with a cut whose two premises are provable, over predicates a and b.

    Yields ``(sequent, cut formula, (left, right))``.
    """
    rng = random.Random(seed)
    sig = Signature(s)
    levels = _levels(s)
    atoms = [Atom("a"), Atom("b")]
    out = []
    seen = set()
    for _ in range(max_tries):
        if len(out) >= n:
            break
        left = tuple(_random_formula(rng, levels, atoms, rng.randint(1, 3)) for _ in range(rng.randint(1, 2)))
        cut = _random_formula(rng, levels, atoms, rng.randint(1, 3))
        right = tuple(_random_formula(rng, levels, atoms, rng.randint(1, 3)) for _ in range(rng.randint(0, 1)))
        goal = _random_formula(rng, levels, atoms, rng.randint(1, 3))
        key = (left, cut, right, goal)
        if key in seen:
            continue
        seen.add(key)
        if not prove(Sequent(left, cut), sig, mode, depth):
            continue
        if not prove(Sequent(right + (cut,), goal), sig, mode, depth):
            continue
        out.append((Sequent(left + right, goal), cut, (left, right)))
    return out


# ---------------------------------------------------------------------------
# non-provability of process encodings


@dataclass
class NonProvabilityReport:
    shapes: int = 0
    provable: list = field(default_factory=list)
    truncated: int = 0
    weakening: int = 0
    equivalent: int = 0
    mismatches: list = field(default_factory=list)
    weakening_inconclusive: int = 0

    @property
    def passed(self) -> bool:
        return not self.provable and not self.mismatches

    def summary(self) -> str:
        return (f"forbidden shapes: {self.shapes} checked, {len(self.provable)} provable, "
                f"{self.truncated} truncated; weakening: {self.equivalent}/{self.weakening} "
                f"equivalent, {self.weakening_inconclusive} inconclusive")


def _random_constraint(rng, levels, preds, consts, allow_exists=True):
    n = rng.randint(1, 2)
    items = []
    evar = None
    if allow_exists and rng.random() < 0.3:
        evar = "X"
    for _ in range(n):
        atoms = []
        for _ in range(rng.randint(1, 2)):
            p = rng.choice(preds)
            arg = Var(evar) if evar and rng.random() < 0.6 else Const(rng.choice(consts))
            atoms.append(Atom(p, (arg,)))
        items.append(Soft(tuple(atoms), rng.choice(levels)))
    c = k.tensor(*items)
    if evar and evar in k.free_vars(c):
        c = k.Exists(evar, c)
    return c


def _random_axiom(rng, levels, preds):
    p, q = rng.sample(preds, 2)
    x = Var("Y")
    return Axiom(("Y",), Soft((Atom(p, (x,)),), rng.choice(levels)),
                 Soft((Atom(q, (x,)),), rng.choice(levels)))


def random_process(rng, levels, preds, consts, depth: int = 2, tells: bool = True):
    """A small process; with ``tells=False`` it never tells and never ends."""
    kinds = ["call", "ask", "local", "par"] + (["tell", "tell"] if tells else [])
    kind = rng.choice(kinds) if depth > 0 else ("tell" if tells and rng.random() < 0.5 else "call")
    match kind:
        case "tell":
            return Tell(_random_constraint(rng, levels, preds, consts))
        case "call":
            return Call(rng.choice(["r", "w"]), (Const(rng.choice(consts)),))
        case "ask":
            return k.ask(_random_constraint(rng, levels, preds, consts),
                         random_process(rng, levels, preds, consts, depth - 1, tells))
        case "local":
            body = random_process(rng, levels, preds, consts, depth - 1, tells)
            return Local("Z", body)
        case _:
            return k.Par(random_process(rng, levels, preds, consts, depth - 1, tells),
                         random_process(rng, levels, preds, consts, depth - 1, tells))


def _theory(rng, s, levels, preds, consts):
    delta = []
    if rng.random() < 0.6:
        delta.append(encode_axiom(_random_axiom(rng, levels, preds), s))
    for _ in range(rng.randint(0, 3)):
        delta.append(from_constraint(_random_constraint(rng, levels, preds, consts, allow_exists=False)))
    return tuple(delta)


def nonprovability_suite(s: CSemiring, samples: int = 100, seed: int = 0, mode: Mode = Mode.SELLS,
                         depth: int = 8, tells: bool = True) -> NonProvabilityReport:
    """Random instances of the two non-provability shapes and of weakening a definition.

    Forbidden shapes are ``D, !b P --> c`` and ``D, P --> c`` with ``P`` a
    process encoding and ``b`` one of the linear labels.  ``tells=False``
    restricts ``P`` to processes that never tell and never reduce to the
    empty process.
    """
    rng = random.Random(seed)
    sig = Signature(s)
    levels = _levels(s)
    preds = ["c", "d", "e"]
    consts = ["a", "b"]
    rep = NonProvabilityReport()
    for _ in range(samples):
        delta = _theory(rng, s, levels, preds, consts)
        goal = from_constraint(_random_constraint(rng, levels, preds, consts))
        p = encode_process(random_process(rng, levels, preds, consts, 2, tells))
        for shape in (p, Bang(Special.P, p), Bang(Special.D, p)):
            rep.shapes += 1
            r = prove(Sequent(delta + (shape,), goal), sig, mode, depth)
            if r.proof is not None:
                rep.provable.append(str(Sequent(delta + (shape,), goal)))
            elif r.truncated:
                rep.truncated += 1
        body = random_process(rng, levels, preds, consts, 2, True)
        params = tuple(sorted(k.free_vars(body)))
        f = encode_definition(Definition("r", params, body))
        with_def = prove(Sequent(delta + (f,), goal), sig, mode, depth)
        without = prove(Sequent(delta, goal), sig, mode, depth)
        rep.weakening += 1
        if with_def.found == without.found:
            rep.equivalent += 1
        elif (with_def.truncated and not with_def.found) or (without.truncated and not without.found):
            rep.weakening_inconclusive += 1
        else:
            rep.mismatches.append(str(Sequent(delta + (f,), goal)))
    return rep


# ---------------------------------------------------------------------------
# differential testing of the entailment procedure


@dataclass(frozen=True)
class Instance:
    semiring: CSemiring
    mode: Mode
    store: tuple  # of Soft
    axioms: tuple
    goal: k.Constraint

    def sequent(self) -> Sequent:
        ctx = tuple(encode_axiom(a, self.semiring) for a in self.axioms)
        ctx += tuple(from_constraint(c) for c in self.store)
        return Sequent(ctx, from_constraint(self.goal))

    def __str__(self) -> str:
        store = ", ".join(k.show(c) for c in self.store)
        axioms = "".join(f"; axiom {k.show(a.premise)} -o {k.show(a.conclusion)}" for a in self.axioms)
        return f"[{self.semiring.name}/{self.mode.value}] {{{store}}}{axioms} |- {k.show(self.goal)}"


def differential_instances(n: int, seed: int = 0, semirings=None):
    """Random store/goal pairs: at most 4 entries, 3 goal atoms, 1 existential, 1 axiom."""
    from ..semiring import FUZZY, PROB, WEIGHTED, CRISP

    semirings = semirings or [FUZZY, PROB, WEIGHTED, CRISP]
    rng = random.Random(seed)
    preds = ["c", "d"]
    consts = ["a", "b"]
    out = []
    for i in range(n):
        s = semirings[i % len(semirings)]
        mode = Mode.SELL if (i // len(semirings)) % 2 == 0 else Mode.SELLS
        levels = _levels(s)
        store = []
        for _ in range(rng.randint(0, 4)):
            atoms = tuple(Atom(rng.choice(preds), (Const(rng.choice(consts)),))
                          for _ in range(rng.randint(1, 2)))
            store.append(Soft(atoms, rng.choice(levels)))
        axioms = ()
        if rng.random() < 0.35:
            axioms = (_random_axiom(rng, levels, preds + ["e"]),)
        evar = rng.random() < 0.35
        budget = 3
        items = []
        while budget > 0 and (not items or rng.random() < 0.5):
            size = rng.randint(1, min(2, budget))
            budget -= size
            atoms = []
            for _ in range(size):
                arg = Var("X") if evar and rng.random() < 0.6 else Const(rng.choice(consts))
                atoms.append(Atom(rng.choice(preds + (["e"] if axioms else [])), (arg,)))
            items.append(Soft(tuple(atoms), rng.choice(levels)))
        goal = k.tensor(*items)
        if evar and "X" in k.free_vars(goal):
            goal = k.Exists("X", goal)
        out.append(Instance(s, mode, tuple(store), axioms, goal))
    return out


@dataclass(frozen=True)
class DifferentialResult:
    instance: Instance
    entails: bool
    provable: bool
    truncated: bool

    @property
    def agree(self) -> bool:
        return self.entails == self.provable

    @property
    def disagreement(self) -> bool:
        """A real disagreement: the verdicts differ and the prover was not cut short."""
        return not self.agree and not (self.truncated and not self.provable)


def differential_check(inst: Instance, depth: int = DEFAULT_DEPTH) -> DifferentialResult:
    st = store_of(*inst.store, s=inst.semiring)
    verdict = entails(st, inst.axioms, inst.goal, inst.mode, inst.semiring)
    sig = Signature(inst.semiring)
    seq = inst.sequent()
    r = prove(seq, sig, inst.mode, depth)
    if r.proof is not None:
        validate(r.proof, sig, inst.mode, seq.context, seq.goal)
    return DifferentialResult(inst, verdict, r.found, r.truncated)
