"""The soft constraint store and its entailment procedure.

A store is a growing multiset of entries.  Each entry is one told bundle
``[A1 * ... * An]@a`` and acts as a single resource: when a goal is checked,
the entries that support it are collected and their levels combined, either
by glb (``Mode.SELL``) or by the semiring product (``Mode.SELLS``).  An entry
used for several atoms is paid for once.

Axioms ``forall xs. c -o d`` are applied by bounded forward chaining.  A
derived atom gets two kinds of support: the union of the supports of the
premise (the axiom used inside the promotion of the goal) and a fresh token
at the conclusion's declared level (the axiom used before it).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .kernel import (
    Atom,
    Axiom,
    Const,
    Constraint,
    Exists,
    Fresh,
    Fun,
    One,
    Soft,
    Term,
    Var,
    all_names,
    free_vars,
    normalize,
    show,
    subst_atom,
    subst_term,
    tensor,
)
from .semiring import SEMIRINGS, CSemiring, Value, format_value

DEFAULT_BOUND = 3


class Mode(enum.Enum):
    SELL = "sell"
    SELLS = "sells"

    @classmethod
    def parse(cls, text: str) -> "Mode":
        try:
            return cls(text.lower())
        except ValueError:
            raise ValueError(f"unknown mode {text!r} (expected sell or sells)") from None


class StoreError(ValueError):
    pass


@dataclass(frozen=True)
class Entry:
    id: int
    atoms: tuple
    level: Value

    def __str__(self) -> str:
        return f"[{' * '.join(map(str, self.atoms))}]@{format_value(self.level)}"


# ---------------------------------------------------------------------------
# equality classes


class EqClasses:
    """Congruence-lite union-find over terms, built from eq atoms."""

    def __init__(self, pairs: Iterable[tuple] = ()):
        self.parent: dict = {}
        pairs = list(pairs)
        changed = True
        while changed:
            changed = False
            for s, t in pairs:
                cs, ct = self.canon(s), self.canon(t)
                if cs != ct:
                    self._union(cs, ct)
                    changed = True

    def find(self, t: Term) -> Term:
        root = t
        while root in self.parent:
            root = self.parent[root]
        while t in self.parent and self.parent[t] != root:
            self.parent[t], t = root, self.parent[t]
        return root

    def _union(self, a: Term, b: Term) -> None:
        a, b = self.find(a), self.find(b)
        if a == b:
            return
        # deterministic representative: constants before variables, then by text
        if _rep_key(b) < _rep_key(a):
            a, b = b, a
        self.parent[b] = a

    def canon(self, t: Term) -> Term:
        if isinstance(t, Fun):
            t = Fun(t.name, tuple(self.canon(a) for a in t.args))
        return self.find(t)

    def canon_atom(self, a: Atom) -> Atom:
        return Atom(a.pred, tuple(self.canon(t) for t in a.args))

    def same(self, s: Term, t: Term) -> bool:
        return self.canon(s) == self.canon(t)

    def classes(self) -> list:
        groups: dict = {}
        for t in list(self.parent):
            groups.setdefault(self.find(t), {self.find(t)}).add(t)
        return sorted((sorted(map(str, g)) for g in groups.values()))


def _rep_key(t: Term):
    return (isinstance(t, Var), str(t))


# ---------------------------------------------------------------------------
# store


@dataclass(frozen=True)
class Store:
    entries: tuple = ()
    hidden: frozenset = frozenset()

    @property
    def items(self) -> list:
        """Flat view: (atom, level, entry id) triples."""
        return [(a, e.level, e.id) for e in self.entries for a in e.atoms]

    @cached_property
    def eq_classes(self) -> EqClasses:
        pairs = [a.args for e in self.entries for a in e.atoms if a.is_eq]
        return EqClasses(pairs)

    def names(self) -> set:
        return set(self.hidden) | free_vars([a for e in self.entries for a in e.atoms])

    def free_vars(self) -> set:
        return free_vars([a for e in self.entries for a in e.atoms]) - set(self.hidden)

    def to_constraint(self, hide: bool = True) -> Constraint:
        body = tensor(*(Soft(e.atoms, e.level) for e in self.entries))
        if hide:
            for v in sorted(self.hidden, reverse=True):
                body = Exists(v, body)
        return body

    def rename(self, mapping: dict) -> "Store":
        m = {k: Var(v) for k, v in mapping.items()}
        entries = tuple(Entry(e.id, tuple(subst_atom(a, m) for a in e.atoms), e.level)
                        for e in self.entries)
        return Store(entries, frozenset(mapping.get(h, h) for h in self.hidden))

    def __str__(self) -> str:
        body = " * ".join(map(str, self.entries)) or "1"
        if self.hidden:
            return f"ex {','.join(sorted(self.hidden))}. {body}"
        return body

    def __len__(self) -> int:
        return len(self.entries)


def add(st: Store, c: Constraint, s: CSemiring | None = None,
        fresh: Fresh | None = None) -> Store:
    """Tell ``c``: its existentials become hidden, each bundle one entry."""
    if fresh is None:
        fresh = Fresh.beyond(st.names() | all_names(c))
    nf = normalize(c, fresh)
    next_id = max((e.id for e in st.entries), default=-1) + 1
    new = []
    for atoms, lvl in nf.items:
        if s is not None and not s.contains(lvl):
            raise StoreError(f"level {lvl} is not a {s.name} value")
        for a in atoms:
            if a.is_eq and s is not None and lvl != s.top:
                raise StoreError(f"equality {a} must be told at the top level")
        new.append(Entry(next_id, atoms, lvl))
        next_id += 1
    if not new and not nf.new_vars:
        return st
    return Store(st.entries + tuple(new), st.hidden | frozenset(nf.new_vars))


def store_of(*cs: Constraint, s: CSemiring | None = None) -> Store:
    st = Store()
    for c in cs:
        st = add(st, c, s)
    return st


# ---------------------------------------------------------------------------
# support bookkeeping


def _insert_antichain(family: list, sup: frozenset) -> bool:
    """Add ``sup`` unless a subset is present; drop supersets.  True if added."""
    for old in family:
        if old <= sup:
            return False
    family[:] = [old for old in family if not sup <= old]
    family.append(sup)
    return True


def _antichain(sets: Iterable[frozenset]) -> list:
    out: list = []
    for s in sorted(set(sets), key=len):
        _insert_antichain(out, s)
    return out


@dataclass
class DerivedAtomTable:
    """Canonical atom -> antichain of supports (sets of token ids)."""

    eq: EqClasses
    supports: dict = field(default_factory=dict)
    levels: dict = field(default_factory=dict)
    origin: dict = field(default_factory=dict)

    def add(self, atom: Atom, sup: frozenset) -> bool:
        fam = self.supports.setdefault(self.eq.canon_atom(atom), [])
        return _insert_antichain(fam, sup)

    def lookup(self, atom: Atom) -> list:
        if atom.is_eq:
            return [frozenset()] if self.eq.same(*atom.args) else []
        return self.supports.get(self.eq.canon_atom(atom), [])

    def bound(self, sup: Iterable, mode: Mode, s: CSemiring) -> Value:
        lv = [self.levels[t] for t in sup]
        return s.glb(lv) if mode is Mode.SELL else s.fold_times(lv)

    def universe(self) -> set:
        out: set = set()
        for atom in self.supports:
            for t in atom.args:
                _subterms(t, out)
        return out

    def covers(self, atoms: Sequence[Atom]) -> list:
        """Every minimal union of one support per atom."""
        families = [self.lookup(a) for a in atoms]
        if any(not f for f in families):
            return []
        return _antichain(frozenset().union(*combo) for combo in itertools.product(*families))

    def best(self, atoms: Sequence[Atom], mode: Mode, s: CSemiring):
        """(best bound, witnessing support) over all covers, or (None, None)."""
        best_v, best_sup = None, None
        for sup in self.covers(atoms):
            v = self.bound(sup, mode, s)
            if best_v is None or s.lt(best_v, v):
                best_v, best_sup = v, sup
        return best_v, best_sup


def _subterms(t: Term, out: set) -> None:
    out.add(t)
    if isinstance(t, Fun):
        for a in t.args:
            _subterms(a, out)


def _infer_semiring(st: Store, extra: Iterable[Value] = ()) -> CSemiring | None:
    for e in st.entries:
        return SEMIRINGS[e.level.kind]
    for v in extra:
        return SEMIRINGS[v.kind]
    return None


# ---------------------------------------------------------------------------
# matching


def _match_term(pat: Term, target: Term, theta: dict, pvars: set, eqc: EqClasses):
    match pat:
        case Var(n) if n in pvars:
            if n in theta:
                return theta if eqc.same(theta[n], target) else None
            return {**theta, n: target}
        case Fun(f, args) if isinstance(target, Fun) and target.name == f \
                and len(target.args) == len(args):
            for p, t in zip(args, target.args):
                theta = _match_term(p, t, theta, pvars, eqc)
                if theta is None:
                    return None
            return theta
        case _:
            return theta if eqc.same(subst_term(pat, theta), target) else None


def _instantiations(atoms: Sequence[Atom], pvars: Sequence[str], table: DerivedAtomTable,
                    universe: Sequence[Term]):
    """Substitutions for ``pvars`` that make every non-eq atom a table atom.

    Variables left unbound by matching range over ``universe``.
    """
    keys = list(table.supports)
    pv = set(pvars)

    def go(i, theta):
        if i == len(atoms):
            rest = [v for v in pvars if v not in theta]
            for combo in itertools.product(universe, repeat=len(rest)):
                yield {**theta, **dict(zip(rest, combo))}
            return
        a = atoms[i]
        if a.is_eq or not (free_vars(a) & pv):
            yield from go(i + 1, theta)
            return
        for k in keys:
            if k.pred != a.pred or len(k.args) != len(a.args):
                continue
            th = theta
            for p, t in zip(a.args, k.args):
                th = _match_term(p, t, th, pv, table.eq)
                if th is None:
                    break
            if th is not None:
                yield from go(i + 1, th)

    seen = set()
    for theta in go(0, {}):
        key = tuple((v, theta[v]) for v in pvars)
        if key not in seen:
            seen.add(key)
            yield theta


# ---------------------------------------------------------------------------
# saturation and entailment


def saturate(st: Store, axioms: Sequence[Axiom] = (), bound: int = DEFAULT_BOUND, *,
             mode: Mode = Mode.SELL, s: CSemiring | None = None) -> DerivedAtomTable:
    """Forward-chain ``axioms`` over the store for at most ``bound`` rounds."""
    s = s or _infer_semiring(st) or SEMIRINGS["fuzzy"]
    table = DerivedAtomTable(st.eq_classes)
    for e in st.entries:
        table.levels[e.id] = e.level
        table.origin[e.id] = str(e)
        for a in e.atoms:
            table.add(a, frozenset({e.id}))
    tokens: dict = {}
    for _ in range(bound):
        changed = False
        universe = sorted(table.universe(), key=str)
        for i, ax in enumerate(axioms):
            pre = normalize(ax.premise)
            con = normalize(ax.conclusion)
            pre_atoms = [a for atoms, _ in pre.items for a in atoms]
            for theta in list(_instantiations(pre_atoms, ax.vars, table, universe)):
                per_item = []
                for atoms, b in pre.items:
                    inst = [subst_atom(a, theta) for a in atoms]
                    ok = [u for u in table.covers(inst) if s.leq(b, table.bound(u, mode, s))]
                    if not ok:
                        break
                    per_item.append(ok)
                else:
                    unions = _antichain(frozenset().union(*c) for c in itertools.product(*per_item))
                    key_theta = tuple((v, str(theta[v])) for v in ax.vars)
                    for j, (atoms, e_lvl) in enumerate(con.items):
                        tkey = (i, key_theta, j)
                        if tkey not in tokens:
                            tid = f"ax{i}#{len(tokens)}"
                            tokens[tkey] = tid
                            table.levels[tid] = e_lvl
                            table.origin[tid] = f"axiom {i} at {dict(key_theta)}"
                        tid = tokens[tkey]
                        for a in atoms:
                            inst = subst_atom(a, theta)
                            changed |= table.add(inst, frozenset({tid}))
                            for u in unions:
                                changed |= table.add(inst, u)
        if not changed:
            break
    return table


def entails(st: Store, axioms: Sequence[Axiom], goal: Constraint, mode: Mode = Mode.SELL,
            s: CSemiring | None = None, bound: int = DEFAULT_BOUND,
            trace: list | None = None) -> bool:
    """Does the store (with axioms) entail ``goal`` under ``mode``?

    When ``trace`` is a list, a JSON-ready record of the successful (or last
    attempted) instantiation is appended to it.
    """
    fresh = Fresh.beyond(st.names() | all_names(goal), prefix="_g")
    nf = normalize(goal, fresh)
    if not nf.items:
        if trace is not None:
            trace.append({"goal": show(goal), "instantiation": {}, "items": [], "verdict": True})
        return True
    s = s or _infer_semiring(st, [lvl for _, lvl in nf.items])
    table = saturate(st, axioms, bound, mode=mode, s=s)
    evars = [v for v in nf.new_vars if v in free_vars([a for atoms, _ in nf.items for a in atoms])]

    universe = set(table.universe())
    ground = [a for atoms, _ in nf.items for a in atoms]
    for a in ground:
        for t in a.args:
            if not (free_vars(t) & set(evars)):
                _subterms(table.eq.canon(t), universe)
    universe.add(Const("_k"))
    universe = sorted({table.eq.canon(t) for t in universe}, key=str)

    items = [(atoms, a) for atoms, a in nf.items]
    last: dict = {}

    def check_item(atoms, a, theta):
        inst = [subst_atom(x, theta) for x in atoms]
        v, sup = table.best(inst, mode, s)
        ok = v is not None and s.leq(a, v)
        rec = {
            "atoms": [str(x) for x in inst],
            "supports": sorted(map(str, sup)) if sup is not None else None,
            "bound": format_value(v) if v is not None else None,
            "level": format_value(a),
            "verdict": ok,
        }
        return ok, rec

    for theta in _instantiations(ground, evars, table, universe):
        recs = []
        for atoms, a in items:
            ok, rec = check_item(atoms, a, theta)
            recs.append(rec)
            if not ok:
                break
        else:
            if trace is not None:
                trace.append({"goal": show(goal), "instantiation": {k: str(t) for k, t in theta.items()},
                              "items": recs, "verdict": True})
            return True
        last = {"goal": show(goal), "instantiation": {k: str(t) for k, t in theta.items()},
                "items": recs, "verdict": False}
    if trace is not None:
        trace.append(last or {"goal": show(goal), "instantiation": None, "items": [], "verdict": False})
    return False


def best_level(st: Store, axioms: Sequence[Axiom], pc: Sequence[Atom], mode: Mode = Mode.SELL,
               s: CSemiring | None = None, bound: int = DEFAULT_BOUND) -> Value:
    """The greatest level at which the pre-constraint ``pc`` is entailed.

    Returns the semiring bottom when no cover exists.
    """
    s = s or _infer_semiring(st)
    if s is None:
        raise StoreError("cannot infer the semiring of an empty store; pass s=")
    table = saturate(st, axioms, bound, mode=mode, s=s)
    v, _ = table.best(list(pc), mode, s)
    return s.bottom if v is None else v


def inter_entails(a: Store, b: Store, axioms: Sequence[Axiom], mode: Mode, s: CSemiring,
                  bound: int = DEFAULT_BOUND) -> bool:
    return (entails(a, axioms, b.to_constraint(), mode, s, bound)
            and entails(b, axioms, a.to_constraint(), mode, s, bound))
