"""Core syntax: terms, atoms, soft constraints, processes and definitions.

Variables are written with an upper-case initial (or a leading underscore for
machine-generated names); everything else is a constant or function symbol.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .semiring import Value, format_value

EQ = "eq"


# ---------------------------------------------------------------------------
# terms and atoms


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Fun:
    name: str
    args: tuple

    def __str__(self) -> str:
        return f"{self.name}({', '.join(map(str, self.args))})"


Term = Union[Var, Const, Fun]


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.pred
        return f"{self.pred}({', '.join(map(str, self.args))})"

    @property
    def is_eq(self) -> bool:
        return self.pred == EQ and len(self.args) == 2


def eq(x: Term, y: Term) -> Atom:
    return Atom(EQ, (x, y))


# ---------------------------------------------------------------------------
# constraints


@dataclass(frozen=True)
class One:
    def __str__(self) -> str:
        return "1"


@dataclass(frozen=True)
class Tensor:
    left: "Constraint"
    right: "Constraint"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Constraint"


@dataclass(frozen=True)
class Soft:
    """A pre-constraint (non-empty tuple of atoms) at a preference level."""

    atoms: tuple
    level: Value

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("a pre-constraint needs at least one atom")


Constraint = Union[One, Tensor, Exists, Soft]


def tensor(*cs: Constraint) -> Constraint:
    """Left-nested tensor; the empty tensor is One."""
    cs = [c for c in cs]
    if not cs:
        return One()
    out = cs[0]
    for c in cs[1:]:
        out = Tensor(out, c)
    return out


# ---------------------------------------------------------------------------
# processes


@dataclass(frozen=True)
class Tell:
    constraint: Constraint


@dataclass(frozen=True)
class Sum:
    """Guarded choice; ``branches`` is a non-empty tuple of (guard, body)."""

    branches: tuple

    def __post_init__(self):
        if not self.branches:
            raise ValueError("a sum needs at least one branch")


@dataclass(frozen=True)
class Par:
    left: "Process"
    right: "Process"


@dataclass(frozen=True)
class Local:
    var: str
    body: "Process"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class Skip:
    """The empty parallel composition."""


Process = Union[Tell, Sum, Par, Local, Call, Skip]


def ask(guard: Constraint, body: "Process") -> Sum:
    return Sum(((guard, body),))


def par(*ps: Process) -> Process:
    ps = [p for p in ps if not isinstance(p, Skip)]
    if not ps:
        return Skip()
    out = ps[0]
    for p in ps[1:]:
        out = Par(out, p)
    return out


def par_components(p: Process) -> list:
    """Flatten nested parallel composition into its multiset of components."""
    match p:
        case Par(l, r):
            return par_components(l) + par_components(r)
        case Skip():
            return []
        case _:
            return [p]


@dataclass(frozen=True)
class Definition:
    name: str
    params: tuple
    body: Process

    def __post_init__(self):
        if len(set(self.params)) != len(self.params):
            raise ValueError(f"definition {self.name}: parameters must be distinct")
        extra = free_vars(self.body) - set(self.params)
        if extra:
            raise ValueError(
                f"definition {self.name}: free variables {sorted(extra)} not among parameters"
            )


@dataclass(frozen=True)
class Axiom:
    """``forall vars. premise -o conclusion`` over quantifier-free constraints."""

    vars: tuple
    premise: Constraint
    conclusion: Constraint

    def __post_init__(self):
        for side in (self.premise, self.conclusion):
            if _has_exists(side):
                raise ValueError("axiom sides must be quantifier-free")
            extra = free_vars(side) - set(self.vars)
            if extra:
                raise ValueError(f"axiom has unbound variables {sorted(extra)}")


def _has_exists(c: Constraint) -> bool:
    match c:
        case Exists():
            return True
        case Tensor(l, r):
            return _has_exists(l) or _has_exists(r)
        case _:
            return False


# ---------------------------------------------------------------------------
# free variables


def free_vars(x) -> set:
    match x:
        case Var(n):
            return {n}
        case Const():
            return set()
        case Fun(_, args) | Atom(_, args) | Call(_, args):
            out = set()
            for a in args:
                out |= free_vars(a)
            return out
        case One() | Skip():
            return set()
        case Tensor(l, r) | Par(l, r):
            return free_vars(l) | free_vars(r)
        case Exists(v, body) | Local(v, body):
            return free_vars(body) - {v}
        case Soft(atoms, _):
            out = set()
            for a in atoms:
                out |= free_vars(a)
            return out
        case Tell(c):
            return free_vars(c)
        case Sum(branches):
            out = set()
            for g, b in branches:
                out |= free_vars(g) | free_vars(b)
            return out
        case Definition(_, params, body):
            return free_vars(body) - set(params)
        case Axiom(vs, pre, con):
            return (free_vars(pre) | free_vars(con)) - set(vs)
    if isinstance(x, (list, tuple, frozenset, set)):
        out = set()
        for y in x:
            out |= free_vars(y)
        return out
    raise TypeError(f"free_vars: unsupported {type(x).__name__}")


def all_names(x) -> set:
    """Every variable name occurring in x, bound or free."""
    match x:
        case Exists(v, body) | Local(v, body):
            return {v} | all_names(body)
        case Tensor(l, r) | Par(l, r):
            return all_names(l) | all_names(r)
        case Tell(c):
            return all_names(c)
        case Sum(branches):
            out = set()
            for g, b in branches:
                out |= all_names(g) | all_names(b)
            return out
    if isinstance(x, (list, tuple, frozenset, set)):
        out = set()
        for y in x:
            out |= all_names(y)
        return out
    return free_vars(x)


# ---------------------------------------------------------------------------
# fresh names and substitution


class Fresh:
    """Monotone counter producing ``_v0, _v1, ...`` (prefix configurable)."""

    def __init__(self, start: int = 0, prefix: str = "_v", avoid: Iterable[str] = ()):
        self.counter = itertools.count(start)
        self.prefix = prefix
        self.avoid = set(avoid)

    def __call__(self, hint: str = "") -> str:
        while True:
            name = f"{self.prefix}{next(self.counter)}"
            if name not in self.avoid:
                self.avoid.add(name)
                return name

    @classmethod
    def beyond(cls, names: Iterable[str], prefix: str = "_v") -> "Fresh":
        """A counter starting after the largest ``prefix<N>`` among names."""
        top = -1
        for n in names:
            if n.startswith(prefix) and n[len(prefix):].isdigit():
                top = max(top, int(n[len(prefix):]))
        return cls(top + 1, prefix, names)


def subst_term(t: Term, m: Mapping[str, Term]) -> Term:
    match t:
        case Var(n):
            return m.get(n, t)
        case Fun(f, args):
            return Fun(f, tuple(subst_term(a, m) for a in args))
        case _:
            return t


def subst_atom(a: Atom, m: Mapping[str, Term]) -> Atom:
    if not m:
        return a
    return Atom(a.pred, tuple(subst_term(t, m) for t in a.args))


def substitute(x, m: Mapping[str, Term], fresh: Fresh | None = None):
    """Simultaneous capture-avoiding substitution on constraints and processes."""
    m = {k: v for k, v in m.items() if not (isinstance(v, Var) and v.name == k)}
    if not m:
        return x
    return _subst(x, m, fresh)


def _binder(v: str, body, m: Mapping[str, Term], fresh: Fresh | None):
    inner = {k: t for k, t in m.items() if k != v}
    if not inner:
        return v, body, inner
    incoming = set()
    for k, t in inner.items():
        if k in free_vars(body):
            incoming |= free_vars(t)
    if v in incoming:
        if fresh is None:
            fresh = Fresh.beyond(all_names(body) | incoming | set(inner) | {v})
        nv = fresh()
        body = _subst(body, {v: Var(nv)}, fresh)
        v = nv
    return v, body, inner


def _subst(x, m, fresh):
    match x:
        case Var() | Const() | Fun():
            return subst_term(x, m)
        case Atom():
            return subst_atom(x, m)
        case One() | Skip():
            return x
        case Soft(atoms, lvl):
            return Soft(tuple(subst_atom(a, m) for a in atoms), lvl)
        case Tensor(l, r):
            return Tensor(_subst(l, m, fresh), _subst(r, m, fresh))
        case Par(l, r):
            return Par(_subst(l, m, fresh), _subst(r, m, fresh))
        case Exists(v, body):
            v, body, inner = _binder(v, body, m, fresh)
            return Exists(v, _subst(body, inner, fresh) if inner else body)
        case Local(v, body):
            v, body, inner = _binder(v, body, m, fresh)
            return Local(v, _subst(body, inner, fresh) if inner else body)
        case Tell(c):
            return Tell(_subst(c, m, fresh))
        case Sum(branches):
            return Sum(tuple((_subst(g, m, fresh), _subst(b, m, fresh)) for g, b in branches))
        case Call(n, args):
            return Call(n, tuple(subst_term(a, m) for a in args))
    raise TypeError(f"substitute: unsupported {type(x).__name__}")


# ---------------------------------------------------------------------------
# normal form


@dataclass(frozen=True)
class NormalForm:
    new_vars: tuple
    items: tuple  # of (atoms tuple, level)

    def __iter__(self):
        return iter((self.new_vars, self.items))


def normalize(c: Constraint, fresh: Fresh | None = None) -> NormalForm:
    """Prenex-tensor form ``ex xs. [pc1]_a1 * ... * [pcn]_an``.

    Every binder is renamed to a name drawn from ``fresh``; One vanishes.
    """
    if fresh is None:
        fresh = Fresh.beyond(all_names(c))
    new_vars: list = []
    items: list = []

    def walk(c, ren):
        match c:
            case One():
                pass
            case Tensor(l, r):
                walk(l, ren)
                walk(r, ren)
            case Exists(v, body):
                nv = fresh(v)
                new_vars.append(nv)
                walk(body, {**ren, v: Var(nv)})
            case Soft(atoms, lvl):
                items.append((tuple(subst_atom(a, ren) for a in atoms), lvl))
            case _:
                raise TypeError(f"normalize: not a constraint: {c!r}")

    walk(c, {})
    return NormalForm(tuple(new_vars), tuple(items))


def denormalize(nf: NormalForm) -> Constraint:
    body = tensor(*(Soft(atoms, lvl) for atoms, lvl in nf.items))
    for v in reversed(nf.new_vars):
        body = Exists(v, body)
    return body


# ---------------------------------------------------------------------------
# plain-text rendering (the frontend printer produces parseable text)


def show(x) -> str:
    match x:
        case Soft(atoms, lvl):
            return f"[{' * '.join(map(str, atoms))}]@{format_value(lvl)}"
        case One():
            return "1"
        case Tensor(l, r):
            return f"{_wrap(l)} * {_wrap(r)}"
        case Exists(v, body):
            return f"ex {v}. {show(body)}"
        case Tell(c):
            return f"tell {_wrap(c)}"
        case Sum(branches):
            return " + ".join(f"ask {_wrap(g)} then {_pwrap(b)}" for g, b in branches)
        case Par(l, r):
            right = f"({show(r)})" if isinstance(r, Par) else show(r)
            return f"{show(l)} || {right}"
        case Local(v, body):
            return f"new {v} in {_pwrap(body)}"
        case Call(n, args):
            return f"{n}({', '.join(map(str, args))})" if args else n
        case Skip():
            return "skip"
    return str(x)


def _wrap(c) -> str:
    return f"({show(c)})" if isinstance(c, (Tensor, Exists)) else show(c)


def _pwrap(p) -> str:
    return f"({show(p)})" if isinstance(p, (Par, Sum)) else show(p)
