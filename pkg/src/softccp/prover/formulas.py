"""Formulas of the linear-logic fragment and the subexponential signature.

Subexponential indices are either semiring values or one of five special
labels: ``p`` (processes), ``d`` (unfoldable calls), ``u`` (definitions) and
the completion points ``botc``/``topc``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Union

from .. import kernel as k
from ..kernel import Atom, Const, Fun, Term, Var, subst_term
from ..semiring import CSemiring, Value, format_value


class Special(enum.Enum):
    P = "p"
    D = "d"
    U = "u"
    BOT_C = "botc"
    TOP_C = "topc"

    def __str__(self) -> str:
        return self.value


Index = Union[Value, Special]


def show_index(i: Index) -> str:
    return str(i) if isinstance(i, Special) else format_value(i)


# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class One:
    def __str__(self) -> str:
        return "1"


@dataclass(frozen=True)
class Top:
    def __str__(self) -> str:
        return "top"


@dataclass(frozen=True)
class Tensor:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return fmt(self)


@dataclass(frozen=True)
class With:
    parts: tuple

    def __post_init__(self):
        if len(self.parts) < 2:
            raise ValueError("With needs at least two parts; use the part itself")

    def __str__(self) -> str:
        return fmt(self)


@dataclass(frozen=True)
class Lolli:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return fmt(self)


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"

    def __str__(self) -> str:
        return fmt(self)


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"

    def __str__(self) -> str:
        return fmt(self)


@dataclass(frozen=True)
class Bang:
    index: Index
    body: "Formula"

    def __str__(self) -> str:
        return fmt(self)


Formula = Union[Atom, One, Top, Tensor, With, Lolli, Exists, Forall, Bang]


def _prec(f) -> int:
    match f:
        case Exists() | Forall():
            return 0
        case Lolli():
            return 1
        case With():
            return 2
        case Tensor():
            return 3
    return 4


def fmt(f, ctx: int = 0) -> str:
    """Parseable text; quantifiers scope as far right as possible."""
    match f:
        case Lolli(l, r):
            text = f"{fmt(l, 2)} -o {fmt(r, 1)}"
        case With(parts):
            text = " & ".join(fmt(x, 3) for x in parts)
        case Tensor(l, r):
            text = f"{fmt(l, 3)} * {fmt(r, 4)}"
        case Exists(v, b):
            text = f"ex {v}. {fmt(b, 0)}"
        case Forall(v, b):
            text = f"all {v}. {fmt(b, 0)}"
        case Bang(i, b):
            text = f"!{show_index(i)} {fmt(b, 4)}"
        case _:
            text = str(f)
    return f"({text})" if _prec(f) < ctx else text


def tensor_all(fs: Iterable[Formula]) -> Formula:
    fs = list(fs)
    if not fs:
        return One()
    return reduce(Tensor, fs)


# ---------------------------------------------------------------------------
# signature


@dataclass(frozen=True)
class Signature:
    """The semiring indices completed with ``p, d, u, botc, topc``.

    On semiring values the order is the semiring order; the special labels
    are unrelated to each other and to the values, sit above ``botc`` and
    below ``topc``.  ``p`` and ``d`` are the only linear indices.
    """

    semiring: CSemiring

    def check(self, i: Index) -> None:
        if isinstance(i, Special):
            return
        if not self.semiring.contains(i):
            raise ValueError(f"unknown index {i!r} for the {self.semiring.name} signature")

    def leq(self, i: Index, j: Index) -> bool:
        self.check(i)
        self.check(j)
        if i == j or i is Special.BOT_C or j is Special.TOP_C:
            return True
        if isinstance(i, Value) and isinstance(j, Value):
            return self.semiring.leq(i, j)
        return False

    def times(self, i: Index, j: Index) -> Index:
        if i is Special.TOP_C:
            return j
        if j is Special.TOP_C:
            return i
        if i is Special.BOT_C or j is Special.BOT_C:
            return Special.BOT_C
        if isinstance(i, Value) and isinstance(j, Value):
            return self.semiring.times(i, j)
        if i == j:
            return i
        return Special.BOT_C

    def product(self, idx: Iterable[Index]) -> Index:
        return reduce(self.times, idx, Special.TOP_C)

    def unbounded(self, i: Index) -> bool:
        return isinstance(i, Value) or i in (Special.U, Special.TOP_C)

    def indices(self) -> tuple:
        return (Special.P, Special.D, Special.U, Special.BOT_C, Special.TOP_C)


# ---------------------------------------------------------------------------
# variables and substitution


def free_vars(f) -> set:
    match f:
        case Atom(_, args):
            return k.free_vars(f)
        case One() | Top():
            return set()
        case Tensor(l, r) | Lolli(l, r):
            return free_vars(l) | free_vars(r)
        case With(parts):
            out = set()
            for p in parts:
                out |= free_vars(p)
            return out
        case Exists(v, b) | Forall(v, b):
            return free_vars(b) - {v}
        case Bang(_, b):
            return free_vars(b)
    raise TypeError(f"not a formula: {f!r}")


def all_vars(f) -> set:
    match f:
        case Exists(v, b) | Forall(v, b):
            return {v} | all_vars(b)
        case Tensor(l, r) | Lolli(l, r):
            return all_vars(l) | all_vars(r)
        case With(parts):
            out = set()
            for p in parts:
                out |= all_vars(p)
            return out
        case Bang(_, b):
            return all_vars(b)
    return free_vars(f)


def subst(f, m: dict):
    """Capture-avoiding substitution of terms for variables."""
    if not m:
        return f
    match f:
        case Atom():
            return k.subst_atom(f, m)
        case One() | Top():
            return f
        case Tensor(l, r):
            return Tensor(subst(l, m), subst(r, m))
        case Lolli(l, r):
            return Lolli(subst(l, m), subst(r, m))
        case With(parts):
            return With(tuple(subst(p, m) for p in parts))
        case Bang(i, b):
            return Bang(i, subst(b, m))
        case Exists(v, b) | Forall(v, b):
            inner = {x: t for x, t in m.items() if x != v}
            if not inner:
                return f
            incoming = set()
            for x, t in inner.items():
                if x in free_vars(b):
                    incoming |= k.free_vars(t)
            if v in incoming:
                avoid = all_vars(b) | incoming | set(inner)
                n = 0
                while f"{v}_{n}" in avoid:
                    n += 1
                nv = f"{v}_{n}"
                b = subst(b, {v: Var(nv)})
                v = nv
            return type(f)(v, subst(b, inner))
    raise TypeError(f"not a formula: {f!r}")


def terms(f, bound: frozenset = frozenset(), out: set | None = None) -> set:
    """Subterms of ``f`` that mention no bound variable."""
    out = set() if out is None else out
    match f:
        case Atom(_, args):
            for t in args:
                _collect(t, bound, out)
        case Tensor(l, r) | Lolli(l, r):
            terms(l, bound, out)
            terms(r, bound, out)
        case With(parts):
            for p in parts:
                terms(p, bound, out)
        case Exists(v, b) | Forall(v, b):
            terms(b, bound | {v}, out)
        case Bang(_, b):
            terms(b, bound, out)
    return out


def _collect(t: Term, bound, out: set) -> bool:
    """Add closed-enough subterms; return True if t avoids bound vars."""
    match t:
        case Var(n):
            ok = n not in bound
        case Const():
            ok = True
        case Fun(_, args):
            ok = all([_collect(a, bound, out) for a in args])
        case _:
            ok = False
    if ok:
        out.add(t)
    return ok


# ---------------------------------------------------------------------------
# constraints as formulas


def from_constraint(c: k.Constraint) -> Formula:
    """``[A]@a`` is ``!a A``; ``[A1*...*An]@a`` is ``!a(!a A1 * ... * !a An)``."""
    match c:
        case k.One():
            return One()
        case k.Tensor(l, r):
            return Tensor(from_constraint(l), from_constraint(r))
        case k.Exists(v, b):
            return Exists(v, from_constraint(b))
        case k.Soft(atoms, lvl):
            if len(atoms) == 1:
                return Bang(lvl, atoms[0])
            return Bang(lvl, tensor_all(Bang(lvl, a) for a in atoms))
    raise TypeError(f"not a constraint: {c!r}")
