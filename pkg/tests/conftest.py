from fractions import Fraction

from hypothesis import settings
from hypothesis import strategies as st

from softccp.semiring import CRISP, FUZZY, NEG_INF, PROB, WEIGHTED, Value

settings.register_profile("default", deadline=None)
settings.load_profile("default")

SEMIRINGS = (CRISP, FUZZY, PROB, WEIGHTED)


def unit_fractions():
    return st.fractions(min_value=0, max_value=1, max_denominator=60)


def values(s):
    match s.name:
        case "crisp":
            return st.booleans().map(lambda b: Value("crisp", b))
        case "weighted":
            finite = st.fractions(max_value=0, min_value=-500, max_denominator=60)
            return st.one_of(st.just(NEG_INF), finite.map(lambda q: Value("weighted", Fraction(q))))
        case name:
            return unit_fractions().map(lambda q: Value(name, Fraction(q)))
