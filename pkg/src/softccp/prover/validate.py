"""Node-by-node checker for proof trees.

Written against the rule schemas only; it shares the formula datatypes with
the prover but none of its search code, so a search bug cannot certify its
own output.
"""

from __future__ import annotations

from collections import Counter

from ..kernel import Atom, Const, Fun, Var
from ..store import Mode
from .formulas import (
    Bang,
    Exists,
    Forall,
    Lolli,
    One,
    Signature,
    Tensor,
    Top,
    With,
    free_vars,
    show_index,
    subst,
)


class InvalidProof(ValueError):
    pass


def validate(tree, sig: Signature, mode: Mode, context=None, goal=None) -> bool:
    """Raise :class:`InvalidProof` at the first bad node; return True otherwise.

    ``context``/``goal`` pin the root to a user sequent (empty classical zone).
    """
    if context is not None:
        if tree.classical or Counter(tree.linear) != Counter(context):
            raise InvalidProof("root context does not match the sequent")
    if goal is not None and tree.goal != goal:
        raise InvalidProof("root goal does not match the sequent")
    _walk(tree, sig, mode)
    return True


def is_valid(tree, sig: Signature, mode: Mode, context=None, goal=None) -> bool:
    try:
        return validate(tree, sig, mode, context, goal)
    except InvalidProof:
        return False


def _walk(node, sig, mode) -> None:
    for f in node.classical:
        if not (isinstance(f, Bang) and sig.unbounded(f.index)):
            raise InvalidProof(f"{node.rule}: classical zone holds {f}")
    if not _check(node, sig, mode):
        raise InvalidProof(f"{node.rule} does not apply to {_show(node)}")
    for p in node.premises:
        _walk(p, sig, mode)


def _show(n) -> str:
    return f"{[str(f) for f in n.classical]} ; {[str(f) for f in n.linear]} --> {n.goal}"


def _ms(xs) -> Counter:
    return Counter(xs)


def _minus(lin, f):
    c = _ms(lin)
    if c[f] == 0:
        return None
    c[f] -= 1
    return c


def _same_cls(node, p) -> bool:
    return set(p.classical) == set(node.classical)


def _one_premise(node, goal=None) -> object:
    if len(node.premises) != 1:
        return None
    p = node.premises[0]
    if not _same_cls(node, p):
        return None
    if goal is not None and p.goal != goal:
        return None
    return p


def _names(node) -> set:
    out = set()
    for f in (*node.classical, *node.linear, node.goal):
        out |= free_vars(f)
    return out


def _check(node, sig: Signature, mode: Mode) -> bool:
    g, lin, cls = node.goal, node.linear, node.classical
    prem = node.premises
    match node.rule:
        case "init":
            return isinstance(g, Atom) and not prem and list(lin) == [g]
        case "one_R":
            return isinstance(g, One) and not prem and not lin
        case "top_R":
            return isinstance(g, Top) and not prem
        case "copy":
            p = _one_premise(node, g)
            return p is not None and any(
                _ms(p.linear) == _ms(lin) + _ms([f.body]) for f in cls)
        case "store":
            if len(prem) != 1 or prem[0].goal != g:
                return False
            p = prem[0]
            for f in set(lin):
                if isinstance(f, Bang) and sig.unbounded(f.index):
                    if set(p.classical) == set(cls) | {f} and _ms(p.linear) == _minus(lin, f):
                        return True
            return False
        case "tensor_L" | "one_L" | "bang_L" | "with_L" | "exists_L" | "forall_L":
            p = _one_premise(node, g)
            return p is not None and any(_left(node.rule, f, lin, p, node) for f in set(lin))
        case "lolli_R":
            p = _one_premise(node)
            return (p is not None and isinstance(g, Lolli) and p.goal == g.right
                    and _ms(p.linear) == _ms(lin) + _ms([g.left]))
        case "forall_R":
            p = _one_premise(node)
            if p is None or not isinstance(g, Forall) or _ms(p.linear) != _ms(lin):
                return False
            e = _eigen(g.body, g.var, p.goal)
            return e is not None and e not in _names(node)
        case "exists_R":
            p = _one_premise(node)
            return (p is not None and isinstance(g, Exists) and _ms(p.linear) == _ms(lin)
                    and _instance(g.body, g.var, p.goal))
        case "with_R":
            return (isinstance(g, With) and len(prem) == len(g.parts)
                    and all(_same_cls(node, p) and _ms(p.linear) == _ms(lin) and p.goal == part
                            for p, part in zip(prem, g.parts)))
        case "tensor_R":
            if not isinstance(g, Tensor) or len(prem) != 2:
                return False
            a, b = prem
            return (_same_cls(node, a) and _same_cls(node, b) and a.goal == g.left
                    and b.goal == g.right and _ms(a.linear) + _ms(b.linear) == _ms(lin))
        case "lolli_L":
            if len(prem) != 2:
                return False
            a, b = prem
            if not (_same_cls(node, a) and _same_cls(node, b) and b.goal == g):
                return False
            for f in set(lin):
                if isinstance(f, Lolli) and a.goal == f.left:
                    rest = _minus(lin, f)
                    used = _ms(b.linear)
                    if used[f.right] == 0:
                        continue
                    used[f.right] -= 1
                    if _ms(a.linear) + used == rest:
                        return True
            return False
        case "bang_R" | "bang_R_S":
            return _promotion(node, sig, mode)
    return False


def _left(rule, f, lin, p, node) -> bool:
    rest = _minus(lin, f)
    got = _ms(p.linear)
    match rule, f:
        case "tensor_L", Tensor(l, r):
            return got == rest + _ms([l, r])
        case "one_L", One():
            return got == rest
        case "bang_L", Bang(_, b):
            return got == rest + _ms([b])
        case "with_L", With(parts):
            return any(got == rest + _ms([x]) for x in parts)
        case "forall_L", Forall(v, b):
            extra = got - rest
            return (sum(extra.values()) == 1 and rest + extra == got
                    and _instance(b, v, next(iter(extra))))
        case "exists_L", Exists(v, b):
            extra = got - rest
            if sum(extra.values()) != 1 or rest + extra != got:
                return False
            e = _eigen(b, v, next(iter(extra)))
            return e is not None and e not in _names(node)
    return False


def _promotion(node, sig: Signature, mode: Mode) -> bool:
    g = node.goal
    if not isinstance(g, Bang) or len(node.premises) != 1:
        return False
    p = node.premises[0]
    if p.goal != g.body or _ms(p.linear) != _ms(node.linear):
        return False
    if not set(p.classical) <= set(node.classical):
        return False
    if not all(isinstance(f, Bang) for f in node.linear):
        return False
    indices = [f.index for f in p.classical] + [f.index for f in node.linear]
    a = g.index
    if mode is Mode.SELL:
        ok = all(sig.leq(a, i) for i in indices)
    else:
        prod = sig.product(indices)
        ok = sig.leq(a, prod)
    if not ok:
        return False
    info = dict(node.info)
    if "levels" in info and sorted(info["levels"]) != sorted(show_index(i) for i in indices):
        return False
    if "bound" in info and mode is Mode.SELLS and node.rule == "bang_R_S":
        return info["bound"] == show_index(sig.product(indices))
    return True


# -- instances of quantified bodies -------------------------------------------


def _instance(body, v: str, target) -> bool:
    """Is ``target`` equal to ``body`` with some term for ``v``?"""
    theta: dict = {}
    if not _match(body, target, v, theta, frozenset()):
        return False
    t = theta.get(v, Const("_k"))
    return subst(body, {v: t}) == target


def _eigen(body, v: str, target):
    theta: dict = {}
    if not _match(body, target, v, theta, frozenset()):
        return None
    t = theta.get(v)
    if t is None:
        return "_unused_" if body == target else None
    if not isinstance(t, Var) or subst(body, {v: t}) != target:
        return None
    return t.name


def _match(pat, tgt, v, theta, bound) -> bool:
    match pat:
        case Var(n) if n == v and n not in bound:
            if v in theta:
                return theta[v] == tgt
            theta[v] = tgt
            return True
        case Var() | Const():
            return pat == tgt
        case Fun(f, args) | Atom(f, args):
            return (type(tgt) is type(pat) and _name(tgt) == f and len(tgt.args) == len(args)
                    and all(_match(a, b, v, theta, bound) for a, b in zip(args, tgt.args)))
        case One() | Top():
            return pat == tgt
        case Tensor(l, r) | Lolli(l, r):
            return (type(tgt) is type(pat) and _match(l, tgt.left, v, theta, bound)
                    and _match(r, tgt.right, v, theta, bound))
        case With(parts):
            return (isinstance(tgt, With) and len(tgt.parts) == len(parts)
                    and all(_match(a, b, v, theta, bound) for a, b in zip(parts, tgt.parts)))
        case Bang(i, b):
            return isinstance(tgt, Bang) and tgt.index == i and _match(b, tgt.body, v, theta, bound)
        case Exists(x, b) | Forall(x, b):
            return (type(tgt) is type(pat) and tgt.var == x
                    and _match(b, tgt.body, v, theta, bound | {x}))
    return False


def _name(x) -> str:
    return x.pred if isinstance(x, Atom) else x.name
