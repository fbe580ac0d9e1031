"""The c-semiring axioms as executable checks over sampled values."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .semiring import CSemiring, Value


def random_value(s: CSemiring, rng: random.Random) -> Value:
    roll = rng.random()
    if s.name == "crisp":
        return Value("crisp", roll < 0.5)
    if roll < 0.08:
        return s.bottom
    if roll < 0.16:
        return s.top
    den = rng.randint(1, 40)
    if s.name == "weighted":
        return Value("weighted", -Fraction(rng.randint(0, 200), den))
    return Value(s.name, Fraction(rng.randint(0, den), den))


def _s2(s, a, b, c):
    p = s.plus
    return (p(a, b) == p(b, a) and p(p(a, b), c) == p(a, p(b, c)) and p(a, a) == a
            and p(a, s.bottom) == a and p(a, s.top) == s.top)


def _s3(s, a, b, c):
    t, p = s.times, s.plus
    return (t(a, b) == t(b, a) and t(t(a, b), c) == t(a, t(b, c))
            and t(a, s.top) == a and t(a, s.bottom) == s.bottom
            and t(a, p(b, c)) == p(t(a, b), t(a, c)))


def _s4(s, a, b, c):
    if not s.leq(a, b):
        return True
    return s.leq(s.plus(a, c), s.plus(b, c)) and s.leq(s.times(a, c), s.times(b, c))


def _s5(s, a, b, c):
    return s.leq(s.times(a, b), a)


def _s6(s, a, b, c):
    return s.leq(s.bottom, a) and s.leq(a, s.top)


def _s7(s, a, b, c):
    j = s.plus(a, b)
    least = not (s.leq(a, c) and s.leq(b, c)) or s.leq(j, c)
    return s.leq(a, j) and s.leq(b, j) and least


def _s8(s, a, b, c):
    return s.plus(a, s.times(b, c)) == s.times(s.plus(a, b), s.plus(a, c))


def _s9(s, a, b, c):
    m = s.times(a, b)
    greatest = not (s.leq(c, a) and s.leq(c, b)) or s.leq(c, m)
    return s.leq(m, a) and s.leq(m, b) and greatest


@dataclass(frozen=True)
class Law:
    name: str
    text: str
    check: Callable
    idempotent_only: bool = False

    def applies(self, s: CSemiring) -> bool:
        return s.idempotent_times or not self.idempotent_only


LAWS = (
    Law("S1", "bottom and top are elements", lambda s, a, b, c: s.contains(s.bottom) and s.contains(s.top)),
    Law("S2", "+ is commutative, associative, idempotent; unit bottom, absorbing top", _s2),
    Law("S3", "x is commutative, associative; unit top, absorbing bottom; distributes over +", _s3),
    Law("S4", "+ and x are monotone", _s4),
    Law("S5", "x is intensive", _s5),
    Law("S6", "bottom and top are the least and greatest elements", _s6),
    Law("S7", "+ is the least upper bound", _s7),
    Law("S8", "+ distributes over x", _s8, idempotent_only=True),
    Law("S9", "x is the greatest lower bound", _s9, idempotent_only=True),
)


def substitution_property(s: CSemiring, a, b, c, d) -> bool:
    """``b <= a x c`` and ``a <= d`` imply ``b <= d x c``."""
    if s.leq(b, s.times(a, c)) and s.leq(a, d):
        return s.leq(b, s.times(d, c))
    return True


@dataclass
class LawReport:
    semiring: str
    checked: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not any(self.failures.values())


def check_laws(s: CSemiring, samples: int = 1000, seed: int = 0) -> LawReport:
    rng = random.Random(seed)
    rep = LawReport(s.name)
    for law in LAWS:
        if not law.applies(s):
            continue
        bad = []
        for _ in range(samples):
            a, b, c = (random_value(s, rng) for _ in range(3))
            if not law.check(s, a, b, c):
                bad.append((a, b, c))
        rep.checked[law.name] = samples
        rep.failures[law.name] = bad
    bad = []
    for _ in range(samples):
        a, b, c, d = (random_value(s, rng) for _ in range(4))
        if not substitution_property(s, a, b, c, d):
            bad.append((a, b, c, d))
    rep.checked["subst"] = samples
    rep.failures["subst"] = bad
    return rep


__all__ = ["LAWS", "Law", "LawReport", "check_laws", "random_value", "substitution_property"]
