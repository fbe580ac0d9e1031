"""Small-step semantics over configurations (hidden vars; processes; store)."""

from __future__ import annotations

import random
import re
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

from .kernel import (
    Axiom,
    Call,
    Constraint,
    Definition,
    Exists,
    Fresh,
    Local,
    One,
    Par,
    Process,
    Skip,
    Soft,
    Sum,
    Tell,
    Var,
    all_names,
    free_vars,
    normalize,
    par_components,
    show,
    substitute,
)
from .semiring import CSemiring, format_value
from .store import DEFAULT_BOUND, Mode, Store, add, entails

DEFAULT_MAX_STEPS = 1000


class InterpreterError(RuntimeError):
    pass


@dataclass(frozen=True)
class Program:
    semiring: CSemiring
    mode: Mode
    axioms: tuple = ()
    defs: tuple = ()
    main: Process = Skip()
    bound: int = DEFAULT_BOUND

    @property
    def definitions(self) -> dict:
        return {d.name: d for d in self.defs}

    def lookup(self, name: str) -> Definition:
        for d in self.defs:
            if d.name == name:
                return d
        raise InterpreterError(f"no definition for process {name!r}")

    def entails(self, store: Store, c: Constraint) -> bool:
        return _entails_cached(store, self.axioms, c, self.mode, self.semiring, self.bound)


@lru_cache(maxsize=65536)
def _entails_cached(store, axioms, c, mode, s, bound):
    return entails(store, axioms, c, mode, s, bound)


@dataclass(frozen=True)
class Configuration:
    hidden: frozenset
    procs: tuple
    store: Store

    @classmethod
    def initial(cls, p: Program) -> "Configuration":
        return cls(frozenset(), tuple(par_components(p.main)), Store())

    def names(self) -> set:
        return set(self.hidden) | self.store.names() | all_names(list(self.procs))

    def hidden_store(self) -> Constraint:
        """``ex X. store`` -- the observable content of the configuration."""
        body = self.store.to_constraint(hide=False)
        for v in sorted(self.hidden | self.store.hidden, reverse=True):
            body = Exists(v, body)
        return body

    def __str__(self) -> str:
        procs = " || ".join(show(p) for p in self.procs) or "skip"
        return f"({{{', '.join(sorted(self.hidden))}}}; {procs}; {self.store})"


@dataclass(frozen=True)
class Step:
    target: Configuration
    rule: str
    index: int
    branch: int | None = None

    @property
    def tag(self) -> str:
        return f"SUM({self.branch})" if self.rule == "SUM" else self.rule


def _replace(procs: tuple, i: int, new: list) -> tuple:
    return procs[:i] + tuple(new) + procs[i + 1:]


def step(p: Program, g: Configuration) -> list:
    """Every successor of ``g`` with its rule tag."""
    out = []
    for i, proc in enumerate(g.procs):
        match proc:
            case Tell(c):
                fresh = Fresh.beyond(g.names())
                st = add(g.store, c, p.semiring, fresh)
                new_hidden = g.hidden | (st.hidden - g.store.hidden)
                out.append(Step(Configuration(new_hidden, _replace(g.procs, i, []), st), "TELL", i))
            case Sum(branches):
                for j, (guard, body) in enumerate(branches):
                    if p.entails(g.store, guard):
                        tgt = Configuration(g.hidden, _replace(g.procs, i, par_components(body)), g.store)
                        out.append(Step(tgt, "SUM", i, j))
            case Local(x, body):
                others = g.procs[:i] + g.procs[i + 1:]
                taken = set(g.hidden) | g.store.names() | free_vars(list(others))
                if x in taken:
                    y = Fresh.beyond(g.names()).__call__()
                    body = substitute(body, {x: Var(y)}, Fresh.beyond(g.names() | {y}))
                    x = y
                tgt = Configuration(g.hidden | {x}, _replace(g.procs, i, par_components(body)), g.store)
                out.append(Step(tgt, "LOCAL", i))
            case Call(name, args):
                d = p.lookup(name)
                if len(d.params) != len(args):
                    raise InterpreterError(f"{name} expects {len(d.params)} arguments")
                body = substitute(d.body, dict(zip(d.params, args)), Fresh.beyond(g.names() | all_names(d.body)))
                out.append(Step(Configuration(g.hidden, _replace(g.procs, i, par_components(body)), g.store),
                                "CALL", i))
            case Par() | Skip():
                raise InterpreterError("configurations hold flattened processes")
    return out


# ---------------------------------------------------------------------------
# canonical keys (configurations modulo alpha-renaming and multiset order)


def _canon_binders(x, depth: int = 0):
    match x:
        case Local(v, body):
            nv = f"_b{depth}"
            return Local(nv, _canon_binders(substitute(body, {v: Var(nv)}), depth + 1))
        case Exists(v, body):
            nv = f"_b{depth}"
            return Exists(nv, _canon_binders(substitute(body, {v: Var(nv)}), depth + 1))
        case Sum(branches):
            return Sum(tuple((_canon_binders(gd, depth), _canon_binders(b, depth)) for gd, b in branches))
        case Par(l, r):
            return Par(_canon_binders(l, depth), _canon_binders(r, depth))
        case _:
            return x


def canonical_key(g: Configuration) -> tuple:
    hidden = set(g.hidden) | set(g.store.hidden)
    procs = [_canon_binders(pr) for pr in g.procs]
    entries = [e for e in g.store.entries]
    blank = {h: Var("?") for h in hidden}

    def text(x) -> str:
        return show(substitute(x, blank)) if hidden else show(x)

    def etext(e, m) -> str:
        return show(substitute(Soft(e.atoms, e.level), m)) if m else show(Soft(e.atoms, e.level))

    procs.sort(key=text)
    entries.sort(key=lambda e: etext(e, blank))
    order: list = []
    for x in [*procs, *[a for e in entries for a in e.atoms]]:
        for n in _occurrence_order(x):
            if n in hidden and n not in order:
                order.append(n)
    ren = {n: Var(f"_h{k}") for k, n in enumerate(order)}
    n_unused = len(hidden) - len(order)
    return (
        tuple(text(pr) if not ren else show(substitute(pr, ren)) for pr in procs),
        tuple(sorted(etext(e, ren) for e in entries)),
        n_unused,
    )


def _occurrence_order(x) -> list:
    return re.findall(r"[A-Z_][A-Za-z0-9_]*", show(x))


# ---------------------------------------------------------------------------
# exploration


@dataclass
class ReachSet:
    configs: list
    keys: set
    edges: list  # (source key, tag, target key)
    truncated: bool

    def __iter__(self):
        return iter(self.configs)

    def __len__(self) -> int:
        return len(self.configs)


@dataclass
class Trace:
    initial: Configuration
    steps: list = field(default_factory=list)
    truncated: bool = False

    @property
    def final(self) -> Configuration:
        return self.steps[-1].target if self.steps else self.initial

    def configurations(self) -> list:
        return [self.initial] + [s.target for s in self.steps]

    def to_json(self) -> dict:
        prev = self.initial
        steps = []
        for s in self.steps:
            steps.append({
                "rule": s.rule,
                "branch": s.branch,
                "proc": show(prev.procs[s.index]),
                "store": [{"atom": str(a), "level": format_value(lv)} for a, lv, _ in s.target.store.items],
                "hidden": sorted(s.target.hidden),
            })
            prev = s.target
        return {"steps": steps, "truncated": self.truncated}


@dataclass(frozen=True)
class Exhaustive:
    max_steps: int = DEFAULT_MAX_STEPS


@dataclass(frozen=True)
class RandomWalk:
    seed: int = 0
    max_steps: int = DEFAULT_MAX_STEPS


def explore(p: Program, max_steps: int = DEFAULT_MAX_STEPS, start: Configuration | None = None,
            stop=None) -> ReachSet:
    """Breadth-first reachability up to ``max_steps`` transitions.

    ``stop(config)`` may end the search early (the set is then partial but
    reported as not truncated only if nothing was cut by the depth bound).
    """
    g0 = start or Configuration.initial(p)
    k0 = canonical_key(g0)
    keys = {k0}
    configs = [g0]
    edges = []
    frontier = deque([(g0, k0, 0)])
    truncated = False
    if stop and stop(g0):
        return ReachSet(configs, keys, edges, False)
    while frontier:
        g, k, depth = frontier.popleft()
        succ = step(p, g)
        if depth >= max_steps:
            truncated |= bool(succ)
            continue
        for s in succ:
            ks = canonical_key(s.target)
            edges.append((k, s.tag, ks))
            if ks in keys:
                continue
            keys.add(ks)
            configs.append(s.target)
            if stop and stop(s.target):
                return ReachSet(configs, keys, edges, truncated)
            frontier.append((s.target, ks, depth + 1))
    return ReachSet(configs, keys, edges, truncated)


def random_trace(p: Program, seed: int = 0, max_steps: int = DEFAULT_MAX_STEPS,
                 start: Configuration | None = None) -> Trace:
    rng = random.Random(seed)
    tr = Trace(start or Configuration.initial(p))
    g = tr.initial
    for _ in range(max_steps):
        succ = step(p, g)
        if not succ:
            return tr
        s = succ[rng.randrange(len(succ))]
        tr.steps.append(s)
        g = s.target
    tr.truncated = bool(step(p, g))
    return tr


def run(p: Program, strategy=Exhaustive()):
    match strategy:
        case Exhaustive(n):
            return explore(p, n)
        case RandomWalk(seed, n):
            return random_trace(p, seed, n)
    raise ValueError(f"unknown strategy {strategy!r}")


# ---------------------------------------------------------------------------
# observables


@dataclass(frozen=True)
class BarbResult:
    found: bool
    truncated: bool
    witness: Configuration | None = None

    def __bool__(self) -> bool:
        return self.found


def observe(p: Program, g: Configuration, c: Constraint) -> bool:
    """``ex X. store |- c`` with the hidden variables renamed apart from c."""
    hidden = set(g.hidden) | set(g.store.hidden)
    fresh = Fresh.beyond(g.names() | all_names(c), prefix="_x")
    st = g.store.rename({h: fresh() for h in hidden}) if hidden else g.store
    return p.entails(st, c)


def barb(p: Program, c: Constraint, max_steps: int = DEFAULT_MAX_STEPS) -> BarbResult:
    hit: list = []

    def stop(g):
        if observe(p, g, c):
            hit.append(g)
            return True
        return False

    rs = explore(p, max_steps, stop=stop)
    if hit:
        return BarbResult(True, False, hit[0])
    return BarbResult(False, rs.truncated)


# ---------------------------------------------------------------------------
# independent single-rule checker


def _multiset(procs) -> Counter:
    return Counter(show(_canon_binders(x)) for x in procs)


def validate_step(p: Program, g: Configuration, s: Step) -> bool:
    """Re-check one transition against its rule without calling ``step``."""
    if not (0 <= s.index < len(g.procs)):
        return False
    proc = g.procs[s.index]
    others = _multiset(g.procs[:s.index] + g.procs[s.index + 1:])
    t = s.target
    match s.rule, proc:
        case "TELL", Tell(c):
            new_hidden = t.hidden - g.hidden
            if not g.hidden <= t.hidden or _multiset(t.procs) != others:
                return False
            old = g.store.entries
            if t.store.entries[:len(old)] != old:
                return False
            added = t.store.entries[len(old):]
            nf = normalize(c, Fresh(0, "_chk"))
            if len(added) != len(nf.items):
                return False
            ren = {v: None for v in nf.new_vars}
            # the new variables must map injectively onto the newly hidden ones
            if len(nf.new_vars) != len(new_hidden):
                return False
            for e, (atoms, lvl) in zip(added, nf.items):
                if e.level != lvl or len(e.atoms) != len(atoms):
                    return False
                for got, want in zip(e.atoms, atoms):
                    if got.pred != want.pred or len(got.args) != len(want.args):
                        return False
                    for ga, wa in zip(got.args, want.args):
                        if isinstance(wa, Var) and wa.name in ren:
                            if ren[wa.name] is None:
                                if not isinstance(ga, Var) or ga.name not in new_hidden:
                                    return False
                                ren[wa.name] = ga.name
                            elif ren[wa.name] != getattr(ga, "name", None):
                                return False
                        elif show(substitute(wa, {k: Var(v) for k, v in ren.items() if v})) != show(ga):
                            return False
            return len(set(v for v in ren.values() if v)) == len(new_hidden)
        case "SUM", Sum(branches):
            if s.branch is None or not (0 <= s.branch < len(branches)):
                return False
            guard, body = branches[s.branch]
            return (t.store == g.store and t.hidden == g.hidden
                    and entails(g.store, p.axioms, guard, p.mode, p.semiring, p.bound)
                    and _multiset(t.procs) == others + _multiset(par_components(body)))
        case "LOCAL", Local(x, body):
            new = t.hidden - g.hidden
            if len(new) != 1 or not g.hidden <= t.hidden or t.store != g.store:
                return False
            (y,) = new
            rest = g.procs[:s.index] + g.procs[s.index + 1:]
            if y in g.hidden or y in g.store.names() or y in free_vars(list(rest)):
                return False
            if y != x and y in free_vars(body):
                return False
            return _multiset(t.procs) == others + _multiset(par_components(substitute(body, {x: Var(y)})))
        case "CALL", Call(name, args):
            d = p.lookup(name)
            body = substitute(d.body, dict(zip(d.params, args)))
            return (t.store == g.store and t.hidden == g.hidden
                    and _multiset(t.procs) == others + _multiset(par_components(body)))
    return False
