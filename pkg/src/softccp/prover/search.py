"""Bounded backward proof search for the dyadic SELL/SELLS calculus.

Sequents are ``Gamma ; Delta --> G``.  ``Gamma`` (the classical zone) is a set
of banged formulas whose index is unbounded, so they may be copied or
dropped; ``Delta`` is a multiset of linear formulas.  A user sequent
``F1, ..., Fn |- G`` starts with an empty classical zone and moves its
unbounded bangs there with the invertible ``store`` rule.

Search runs the invertible rules eagerly and for free, then tries every
non-invertible rule at the cost of one unit of depth.  Repeated sequents on
a branch are cut (a proof through a repetition can always be shortened),
and results are memoised per call.  A failure is reported as truncated when
the depth bound stopped some rule from being tried.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

from ..kernel import Atom, Const, Var
from ..semiring import format_value
from ..store import Mode
from .formulas import (
    Bang,
    Exists,
    Forall,
    Index,
    Lolli,
    One,
    Signature,
    Special,
    Tensor,
    Top,
    With,
    all_vars,
    fmt,
    show_index,
    subst,
    terms,
)

DEFAULT_DEPTH = 10
WITNESS_CONST = Const("_k")


@dataclass(frozen=True)
class Sequent:
    context: tuple
    goal: object

    def __str__(self) -> str:
        left = ", ".join(fmt(f, 1) for f in self.context)
        return f"{left} |- {fmt(self.goal)}" if left else f"|- {fmt(self.goal)}"


@dataclass(frozen=True)
class ProofTree:
    """One rule application; ``info`` holds witnesses as (key, value) pairs."""

    rule: str
    classical: tuple
    linear: tuple
    goal: object
    premises: tuple = ()
    info: tuple = ()

    @property
    def sequent(self) -> Sequent:
        return Sequent(self.classical + self.linear, self.goal)

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def height(self) -> int:
        return 1 + max((p.height() for p in self.premises), default=0)

    def rules(self):
        yield self.rule
        for p in self.premises:
            yield from p.rules()

    def to_json(self) -> dict:
        return {
            "rule": self.rule,
            "classical": [fmt(f) for f in self.classical],
            "linear": [fmt(f) for f in self.linear],
            "goal": fmt(self.goal),
            "info": {k: v for k, v in self.info},
            "premises": [p.to_json() for p in self.premises],
        }

    def pretty(self, indent: int = 0) -> str:
        pad = "  " * indent
        ctx = ", ".join(fmt(f, 1) for f in self.classical)
        lin = ", ".join(fmt(f, 1) for f in self.linear)
        extra = "".join(f" {k}={v}" for k, v in self.info)
        lines = [f"{pad}{self.rule}{extra}: {ctx} ; {lin} --> {fmt(self.goal)}"]
        lines += [p.pretty(indent + 1) for p in self.premises]
        return "\n".join(lines)


@dataclass(frozen=True)
class ProofResult:
    proof: ProofTree | None
    truncated: bool

    @property
    def found(self) -> bool:
        return self.proof is not None

    def __bool__(self) -> bool:
        return self.proof is not None


def check_promotion(indices, target: Index, mode: Mode, sig: Signature) -> bool:
    """Side condition of promoting ``!target`` over a context with ``indices``."""
    indices = list(indices)
    for i in indices:
        sig.check(i)
    sig.check(target)
    if mode is Mode.SELL:
        return all(sig.leq(target, i) for i in indices)
    return sig.leq(target, sig.product(indices))


def promotion_bound(indices, mode: Mode, sig: Signature) -> str:
    indices = list(indices)
    if mode is Mode.SELLS:
        return show_index(sig.product(indices))
    if all(not isinstance(i, Special) for i in indices):
        return format_value(sig.semiring.glb(indices))
    return "glb(" + ", ".join(show_index(i) for i in indices) + ")"


def _sort(fs) -> tuple:
    return tuple(sorted(fs, key=lambda f: (fmt(f), repr(f))))


def _without(lin: tuple, i: int) -> tuple:
    return lin[:i] + lin[i + 1:]


def _splits(lin: tuple):
    """Distinct ways to cut a multiset in two, smaller left parts first."""
    seen = set()
    n = len(lin)
    for size in range(n + 1):
        for left in itertools.combinations(range(n), size):
            lhs = tuple(lin[i] for i in left)
            if lhs in seen:
                continue
            seen.add(lhs)
            rhs = tuple(lin[i] for i in range(n) if i not in left)
            yield lhs, rhs


def _positive_bangs(f, positive: bool, out: set) -> None:
    match f:
        case Bang(i, b):
            if positive:
                out.add(i)
            _positive_bangs(b, positive, out)
        case Tensor(l, r):
            _positive_bangs(l, positive, out)
            _positive_bangs(r, positive, out)
        case Lolli(l, r):
            _positive_bangs(l, not positive, out)
            _positive_bangs(r, positive, out)
        case With(parts):
            for p in parts:
                _positive_bangs(p, positive, out)
        case Exists(_, b) | Forall(_, b):
            _positive_bangs(b, positive, out)


def goal_indices(classical, linear, goal) -> set:
    """Indices of bangs that may end up on the right of some sequent."""
    out: set = set()
    _positive_bangs(goal, True, out)
    for f in (*classical, *linear):
        _positive_bangs(f, False, out)
    return out


def _fresh_eigen(classical, linear, goal) -> str:
    used = set()
    for f in (*classical, *linear, goal):
        used |= all_vars(f)
    n = 0
    while f"_e{n}" in used:
        n += 1
    return f"_e{n}"


def universe(classical, linear, goal) -> list:
    out: set = set()
    for f in (*classical, *linear, goal):
        terms(f, frozenset(), out)
    out.add(WITNESS_CONST)
    return sorted(out, key=lambda t: (str(t), repr(t)))


@functools.lru_cache(maxsize=None)
def _available(f) -> frozenset:
    """Predicates that a formula on the left can hand to an initial sequent."""
    match f:
        case Atom(pred, _):
            return frozenset({pred})
        case Tensor(l, r):
            return _available(l) | _available(r)
        case With(parts):
            return frozenset().union(*map(_available, parts))
        case Bang(_, b) | Exists(_, b) | Forall(_, b):
            return _available(b)
        case Lolli(_, r):
            return _available(r)
    return frozenset()


@functools.lru_cache(maxsize=None)
def _needed(f) -> frozenset:
    """Predicates that every proof of ``f`` on the right must close with."""
    match f:
        case Atom(pred, _):
            return frozenset({pred})
        case Tensor(l, r):
            return _needed(l) | _needed(r)
        case With(parts):
            return frozenset().union(*map(_needed, parts))
        case Bang(_, b) | Exists(_, b) | Forall(_, b):
            return _needed(b)
        case Lolli(l, r):
            return _needed(r) - _available(l)
    return frozenset()


def relevant(cls, lin, goal) -> bool:
    need = _needed(goal)
    if not need:
        return True
    have = set()
    for f in (*cls, *lin):
        have |= _available(f)
    return need <= have


class _Search:
    def __init__(self, sig: Signature, mode: Mode):
        self.sig = sig
        self.mode = mode
        self.proved: dict = {}
        self.failed: dict = {}  # key -> depth at which it failed (None = always)
        self.ancestors: set = set()

    # -- invertible phase ---------------------------------------------------

    def invert(self, cls: frozenset, lin: tuple, goal):
        chain = []
        while True:
            step = self._one_invertible(cls, lin, goal)
            if step is None:
                return chain, cls, lin, goal
            rule, info, ncls, nlin, ngoal = step
            chain.append((rule, cls, lin, goal, info))
            cls, lin, goal = ncls, _sort(nlin), ngoal

    def _one_invertible(self, cls, lin, goal):
        match goal:
            case Lolli(l, r):
                return "lolli_R", (), cls, lin + (l,), r
            case Forall(v, b):
                e = _fresh_eigen(cls, lin, goal)
                return "forall_R", (("eigen", e),), cls, lin, subst(b, {v: Var(e)})
        eager = []
        for i, f in enumerate(lin):
            rest = _without(lin, i)
            match f:
                case Tensor(l, r):
                    return "tensor_L", (), cls, rest + (l, r), goal
                case One():
                    return "one_L", (), cls, rest, goal
                case Exists(v, b):
                    e = _fresh_eigen(cls, lin, goal)
                    return "exists_L", (("eigen", e),), cls, rest + (subst(b, {v: Var(e)}),), goal
                case Bang(idx, b) if self.sig.unbounded(idx):
                    return "store", (), cls | {f}, rest, goal
                case Bang(idx, b):
                    eager.append((i, idx, b))
        if eager:
            targets = goal_indices(cls, lin, goal)
            for i, idx, b in eager:
                if not any(self.sig.leq(t, idx) for t in targets):
                    return "bang_L", (), cls, _without(lin, i) + (b,), goal
        return None

    # -- search -------------------------------------------------------------

    def search(self, cls: frozenset, lin: tuple, goal, depth: int, focus=None):
        """Return (proof or None, truncated, looped).

        ``focus`` names a linear formula just produced by a single-premise
        left rule; only left rules on it are tried, since such a rule
        permutes up to the point where its result is used.
        """
        chain, cls, lin, goal = self.invert(cls, _sort(lin), goal)
        if focus is not None and focus not in lin:
            focus = None
        proof, truncated, looped = self.core(cls, lin, goal, depth, focus)
        if proof is not None:
            for rule, c, l, g, info in reversed(chain):
                proof = ProofTree(rule, _sort(c), l, g, (proof,), info)
        return proof, truncated, looped

    def core(self, cls, lin, goal, depth, focus=None):
        key = (cls, lin, goal, focus)
        if key in self.proved:
            return self.proved[key], False, False
        if key in self.failed:
            limit = self.failed[key]
            if limit is None or limit >= depth:
                return None, limit is not None, False
        if key in self.ancestors:
            return None, False, True
        self.ancestors.add(key)
        try:
            proof, truncated, looped = self._core(cls, lin, goal, depth, focus)
        finally:
            self.ancestors.discard(key)
        if proof is not None:
            self.proved[key] = proof
        elif not looped:
            self.failed[key] = depth if truncated else None
        return proof, truncated, looped

    def _node(self, rule, cls, lin, goal, premises=(), info=()):
        return ProofTree(rule, _sort(cls), lin, goal, tuple(premises), tuple(info))

    def _core(self, cls, lin, goal, depth, focus):
        # free leaves and the additive right rule
        match goal:
            case Top():
                return self._node("top_R", cls, lin, goal), False, False
            case One() if not lin:
                return self._node("one_R", cls, lin, goal), False, False
            case Atom():
                if lin == (goal,):
                    return self._node("init", cls, lin, goal), False, False
                if not lin:
                    for f in _sort(cls):
                        if f.body == goal:
                            leaf = self._node("init", cls, (goal,), goal)
                            return self._node("copy", cls, lin, goal, [leaf],
                                              [("formula", fmt(f))]), False, False
        if not relevant(cls, lin, goal):
            return None, False, False
        if isinstance(goal, With) and focus is None:
            subs = []
            trunc = loop = False
            for p in goal.parts:
                pr, t, lp = self.search(cls, lin, p, depth)
                trunc |= t
                loop |= lp
                if pr is None:
                    return None, trunc, loop
                subs.append(pr)
            return self._node("with_R", cls, lin, goal, subs), False, False

        trunc = loop = False
        moves = self.focused(cls, lin, goal, focus) if focus is not None else self.moves(cls, lin, goal)
        for rule, premises, info in moves:
            if depth <= 0:
                return None, True, loop
            subs = []
            for pcls, plin, pgoal, pfocus in premises:
                pr, t, lp = self.search(pcls, plin, pgoal, depth - 1, pfocus)
                trunc |= t
                loop |= lp
                if pr is None:
                    break
                subs.append(pr)
            else:
                return self._node(rule, cls, lin, goal, subs, info), False, False
        return None, trunc, loop

    # -- non-invertible moves -------------------------------------------------

    def moves(self, cls, lin, goal):
        match goal:
            case Tensor(l, r):
                for lhs, rhs in _splits(lin):
                    if isinstance(l, Top):
                        lhs, rhs = rhs, lhs
                    yield "tensor_R", [(cls, lhs, l, None), (cls, rhs, r, None)], ()
            case Exists(v, b):
                for t in universe(cls, lin, goal):
                    yield "exists_R", [(cls, lin, subst(b, {v: t}), None)], (("term", str(t)),)
            case Bang(a, b):
                yield from self._promotions(cls, lin, a, b)
        done = set()
        for f in lin:
            if f not in done:
                done.add(f)
                yield from self.focused(cls, lin, goal, f)
        for f in _sort(cls):
            if not isinstance(f.body, Atom):
                yield "copy", [(cls, lin + (f.body,), goal, f.body)], (("formula", fmt(f)),)

    def focused(self, cls, lin, goal, f):
        """Left rules whose principal formula is ``f``."""
        rest = _without(lin, lin.index(f))
        match f:
            case Lolli(l, r):
                for lhs, rhs in _splits(rest):
                    yield "lolli_L", [(cls, lhs, l, None), (cls, rhs + (r,), goal, None)], ()
            case With(parts):
                for j, p in enumerate(parts):
                    yield "with_L", [(cls, rest + (p,), goal, p)], (("choice", j),)
            case Forall(v, b):
                for t in universe(cls, lin, goal):
                    inst = subst(b, {v: t})
                    yield "forall_L", [(cls, rest + (inst,), goal, inst)], (("term", str(t)),)
            case Bang(_, b):
                yield "bang_L", [(cls, rest + (b,), goal, b)], ()

    def _promotions(self, cls, lin, a, body):
        sig, mode = self.sig, self.mode
        if not all(isinstance(f, Bang) for f in lin):
            return
        lin_idx = [f.index for f in lin]
        rule = "bang_R" if mode is Mode.SELL else "bang_R_S"
        cands = [f for f in _sort(cls) if sig.leq(a, f.index)]
        if mode is Mode.SELL:
            if not check_promotion(lin_idx, a, mode, sig):
                return
            kept = [cands]
        else:
            units = [f for f in cands if f.index in (Special.TOP_C, sig.semiring.top)]
            rest = [f for f in cands if f not in units]
            kept = []
            for size in range(len(rest), -1, -1):
                for sub in itertools.combinations(rest, size):
                    if any(set(sub) <= set(k) for k in kept):
                        continue
                    if check_promotion(lin_idx + [f.index for f in sub], a, mode, sig):
                        kept.append(list(sub))
            kept = [units + k for k in kept]
        for k in kept:
            used = lin_idx + [f.index for f in k]
            info = (("target", show_index(a)),
                    ("levels", [show_index(i) for i in used]),
                    ("bound", promotion_bound(used, mode, sig)))
            yield rule, [(frozenset(k), lin, body, None)], info


def prove(seq: Sequent, sig: Signature, mode: Mode = Mode.SELL, depth: int = DEFAULT_DEPTH) -> ProofResult:
    """Search for a cut-free proof of ``seq`` using at most ``depth`` choices per branch."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    for f in (*seq.context, seq.goal):
        _check_indices(f, sig)
    s = _Search(sig, mode)
    proof, truncated, _ = s.search(frozenset(), tuple(seq.context), seq.goal, depth)
    return ProofResult(proof, truncated if proof is None else False)


def _check_indices(f, sig: Signature) -> None:
    match f:
        case Bang(i, b):
            sig.check(i)
            _check_indices(b, sig)
        case Tensor(l, r) | Lolli(l, r):
            _check_indices(l, sig)
            _check_indices(r, sig)
        case With(parts):
            for p in parts:
                _check_indices(p, sig)
        case Exists(_, b) | Forall(_, b):
            _check_indices(b, sig)
