"""Constraint semirings with exact arithmetic.

Four instances ship: crisp, fuzzy, probabilistic and weighted.  Values are
tagged with the instance they belong to so that mixing them is caught early.
Rational levels are stored as :class:`fractions.Fraction`; decimal literals
convert exactly (``0.14`` is ``7/50``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Union

Number = Union[Fraction, bool, None]


class SemiringError(ValueError):
    pass


class InstanceMismatch(SemiringError):
    pass


@dataclass(frozen=True)
class Value:
    """A semiring element.  ``num`` is ``None`` only for weighted ``-inf``."""

    kind: str
    num: Number

    def __str__(self) -> str:
        return format_value(self)

    def __repr__(self) -> str:
        return f"Value({self.kind}, {format_value(self)})"


NEG_INF = Value("weighted", None)


@dataclass(frozen=True)
class CSemiring:
    name: str
    bottom: Value
    top: Value
    idempotent_times: bool

    # -- membership -------------------------------------------------------

    def check(self, *values: Value) -> None:
        for v in values:
            if not isinstance(v, Value) or v.kind != self.name:
                raise InstanceMismatch(f"{v!r} does not belong to the {self.name} semiring")

    def contains(self, v: Value) -> bool:
        try:
            self.check(v)
        except InstanceMismatch:
            return False
        return True

    def value(self, x) -> Value:
        """Build a value from a Python number/bool/string, validating range."""
        if isinstance(x, Value):
            self.check(x)
            return x
        if isinstance(x, str):
            return self.parse(x)
        if self.name == "crisp":
            if not isinstance(x, bool):
                raise SemiringError(f"crisp values are booleans, got {x!r}")
            return Value("crisp", x)
        if x is None:
            if self.name == "weighted":
                return NEG_INF
            raise SemiringError("None is only valid as weighted -inf")
        q = Fraction(x) if not isinstance(x, float) else Fraction(str(x))
        if self.name in ("fuzzy", "prob") and not (0 <= q <= 1):
            raise SemiringError(f"{self.name} level {x} outside [0,1]")
        if self.name == "weighted" and q > 0:
            raise SemiringError(f"weighted level {x} must be <= 0")
        return Value(self.name, q)

    # -- algebra ----------------------------------------------------------

    def plus(self, a: Value, b: Value) -> Value:
        self.check(a, b)
        if self.name == "crisp":
            return Value("crisp", a.num or b.num)
        return a if self._key(a) >= self._key(b) else b

    def times(self, a: Value, b: Value) -> Value:
        self.check(a, b)
        match self.name:
            case "crisp":
                return Value("crisp", a.num and b.num)
            case "fuzzy":
                return a if a.num <= b.num else b
            case "prob":
                return Value("prob", a.num * b.num)
            case _:
                if a.num is None or b.num is None:
                    return NEG_INF
                return Value("weighted", a.num + b.num)

    def leq(self, a: Value, b: Value) -> bool:
        return self.plus(a, b) == b

    def lt(self, a: Value, b: Value) -> bool:
        return a != b and self.leq(a, b)

    def glb(self, values: Iterable[Value]) -> Value:
        """Order-minimum; valid because every shipped instance is a chain.

        A user-supplied semiring whose order is not total must override this.
        """
        vals = list(values)
        self.check(*vals)
        if not vals:
            return self.top
        return min(vals, key=self._key)

    def fold_times(self, values: Iterable[Value]) -> Value:
        return reduce(self.times, values, self.top)

    def max(self, values: Iterable[Value]) -> Value:
        return reduce(self.plus, values, self.bottom)

    def _key(self, v: Value):
        if self.name == "crisp":
            return int(v.num)
        if v.num is None:
            return float("-inf")
        return v.num

    def sort_key(self, v: Value):
        self.check(v)
        return self._key(v)

    # -- text -------------------------------------------------------------

    def parse(self, text: str) -> Value:
        t = text.strip()
        if t == "top":
            return self.top
        if t == "bot":
            return self.bottom
        if self.name == "crisp":
            if t in ("true", "1"):
                return Value("crisp", True)
            if t in ("false", "0"):
                return Value("crisp", False)
            raise SemiringError(f"bad crisp literal {text!r}")
        if self.name == "weighted" and t == "-inf":
            return NEG_INF
        try:
            q = Fraction(t)
        except (ValueError, ZeroDivisionError):
            raise SemiringError(f"bad {self.name} literal {text!r}") from None
        return self.value(q)

    def format(self, v: Value) -> str:
        self.check(v)
        return format_value(v)

    def __str__(self) -> str:
        return self.name


def format_value(v: Value) -> str:
    if v.kind == "crisp":
        return "true" if v.num else "false"
    if v.num is None:
        return "-inf"
    q: Fraction = v.num
    if q.denominator == 1:
        return str(q.numerator)
    # exact decimal when the denominator only has factors 2 and 5
    d = q.denominator
    k = 0
    while d % 2 == 0 or d % 5 == 0:
        d //= 2 if d % 2 == 0 else 5
        k += 1
    if d != 1:
        return f"{q.numerator}/{q.denominator}"
    scaled = abs(q.numerator) * 10**k // q.denominator
    digits = str(scaled).rjust(k + 1, "0")
    text = f"{digits[:-k]}.{digits[-k:]}".rstrip("0")
    return ("-" if q < 0 else "") + text


CRISP = CSemiring("crisp", Value("crisp", False), Value("crisp", True), True)
FUZZY = CSemiring("fuzzy", Value("fuzzy", Fraction(0)), Value("fuzzy", Fraction(1)), True)
PROB = CSemiring("prob", Value("prob", Fraction(0)), Value("prob", Fraction(1)), False)
WEIGHTED = CSemiring("weighted", NEG_INF, Value("weighted", Fraction(0)), False)

SEMIRINGS = {s.name: s for s in (CRISP, FUZZY, PROB, WEIGHTED)}


def get_semiring(name: str) -> CSemiring:
    aliases = {"probabilistic": "prob", "weight": "weighted", "bool": "crisp"}
    try:
        return SEMIRINGS[aliases.get(name, name)]
    except KeyError:
        raise SemiringError(f"unknown semiring {name!r}") from None


# module-level conveniences mirroring the operation names

def plus(s: CSemiring, a: Value, b: Value) -> Value:
    return s.plus(a, b)


def times(s: CSemiring, a: Value, b: Value) -> Value:
    return s.times(a, b)


def leq(s: CSemiring, a: Value, b: Value) -> bool:
    return s.leq(a, b)


def glb(s: CSemiring, values: Iterable[Value]) -> Value:
    return s.glb(values)


def fold_times(s: CSemiring, values: Iterable[Value]) -> Value:
    return s.fold_times(values)
