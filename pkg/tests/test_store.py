import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from softccp.frontend.syntax import parse_constraint
from softccp.kernel import Atom, Axiom, Const, Soft, Var
from softccp.semiring import FUZZY, PROB, WEIGHTED
from softccp.store import Mode, StoreError, add, best_level, entails, inter_entails, store_of

LEVELS = {
    "fuzzy": ["0", "0.1", "0.2", "0.5", "0.7", "1"],
    "prob": ["0", "0.1", "0.2", "0.5", "0.7", "1"],
    "weighted": ["-inf", "-7", "-5", "-2", "-1", "0"],
}
ATOMS = [Atom("c", (Const("a"),)), Atom("c", (Const("b"),)), Atom("d", (Const("a"),))]


def oracle_best(entries, goal_atoms, mode, s):
    """Best level over every subset of entries whose atoms cover the goal."""
    best = None
    for r in range(1, len(entries) + 1):
        for chosen in itertools.combinations(entries, r):
            covered = {a for atoms, _ in chosen for a in atoms}
            if not set(goal_atoms) <= covered:
                continue
            lvls = [lvl for _, lvl in chosen]
            v = s.glb(lvls) if mode is Mode.SELL else s.fold_times(lvls)
            best = v if best is None else s.plus(best, v)
    return best


def instance(s):
    entry = st.tuples(st.lists(st.sampled_from(ATOMS), min_size=1, max_size=2, unique=True),
                      st.sampled_from(LEVELS[s.name]).map(s.parse))
    return st.tuples(
        st.lists(entry, max_size=4),
        st.lists(st.sampled_from(ATOMS), min_size=1, max_size=3, unique=True),
        st.sampled_from(LEVELS[s.name]).map(s.parse),
        st.sampled_from(list(Mode)),
    )


@pytest.mark.parametrize("s", [FUZZY, PROB, WEIGHTED], ids=lambda s: s.name)
@given(data=st.data())
def test_entails_matches_subset_oracle(s, data):
    entries, goal_atoms, a, mode = data.draw(instance(s))
    st_ = store_of(*(Soft(tuple(atoms), lvl) for atoms, lvl in entries), s=s)
    best = oracle_best(entries, goal_atoms, mode, s)
    expected = best is not None and s.leq(a, best)
    assert entails(st_, (), Soft(tuple(goal_atoms), a), mode, s) == expected
    assert best_level(st_, (), goal_atoms, mode, s) == (s.bottom if best is None else best)


def c(text, s):
    return parse_constraint(text, s)


def test_probabilistic_split():
    st_ = store_of(c("[c]@0.7 * [d]@0.2", PROB), s=PROB)
    for a, sells in [("0.14", True), ("0.1", True), ("0.15", False), ("0.2", False)]:
        assert entails(st_, (), c(f"[c * d]@{a}", PROB), Mode.SELLS, PROB) is sells
        assert entails(st_, (), c(f"[c * d]@{a}", PROB), Mode.SELL, PROB)


def test_weighted_deduction():
    st_ = store_of(c("[c1]@-2 * [c2]@-7", WEIGHTED), s=WEIGHTED)
    assert best_level(st_, (), [Atom("c1"), Atom("c2")], Mode.SELLS, WEIGHTED) == WEIGHTED.value(-9)
    assert not entails(st_, (), c("[c1 * c2]@-8", WEIGHTED), Mode.SELLS, WEIGHTED)
    assert entails(st_, (), c("[c1 * c2]@-9", WEIGHTED), Mode.SELLS, WEIGHTED)


def test_fuzzy_guard_not_entailed():
    st_ = store_of(c("[c]@0.7 * [d]@0.2", FUZZY), s=FUZZY)
    assert not entails(st_, (), c("[c * d]@0.5", FUZZY), Mode.SELL, FUZZY)
    assert entails(st_, (), c("[c]@0.3", FUZZY), Mode.SELL, FUZZY)


def test_shared_support_counts_once():
    # one entry supporting two atoms is multiplied in once
    st_ = store_of(c("[c * d]@0.5", PROB), s=PROB)
    assert entails(st_, (), c("[c * d]@0.5", PROB), Mode.SELLS, PROB)
    assert entails(st_, (), c("[c]@0.5 * [d]@0.5", PROB), Mode.SELLS, PROB)


@pytest.mark.parametrize("x,expected", [("0.3", True), ("0.6", True), ("0.61", False), ("1", False)])
def test_refinement(x, expected):
    st_ = store_of(c("[c]@0.3", FUZZY), c("[c]@0.6", FUZZY), s=FUZZY)
    assert entails(st_, (), c(f"[c]@{x}", FUZZY), Mode.SELL, FUZZY) is expected


@given(st.sampled_from(LEVELS["prob"]), st.sampled_from(LEVELS["prob"]), st.sampled_from(list(Mode)))
def test_adding_twice_changes_nothing_observable(a, b, mode):
    told = c(f"[c]@{a} * [d]@{b}", PROB)
    once = add(store_of(s=PROB), told, PROB)
    twice = add(once, told, PROB)
    for goal in ["[c]@0.5", "[c * d]@0.1", "[c * d]@0.04", "[d]@1", "[c]@0.7 * [d]@0.7"]:
        g = c(goal, PROB)
        assert entails(once, (), g, mode, PROB) == entails(twice, (), g, mode, PROB)
    assert inter_entails(once, twice, (), mode, PROB)


def test_existential_goal():
    st_ = store_of(c("[c(a) * d(a)]@0.7 * [c(b)]@1", FUZZY), s=FUZZY)
    assert entails(st_, (), c("ex X. [c(X) * d(X)]@0.5", FUZZY), Mode.SELL, FUZZY)
    assert entails(st_, (), c("ex X. [c(X)]@1", FUZZY), Mode.SELL, FUZZY)
    assert not entails(st_, (), c("ex X. [d(X)]@1", FUZZY), Mode.SELL, FUZZY)


def test_hidden_variables_witness_goals():
    st_ = store_of(c("ex Y. [c(Y)]@1", FUZZY), s=FUZZY)
    assert entails(st_, (), c("ex X. [c(X)]@1", FUZZY), Mode.SELL, FUZZY)
    assert not entails(st_, (), c("[c(a)]@1", FUZZY), Mode.SELL, FUZZY)


def test_equality_closes_over_terms():
    st_ = store_of(c("[c(a)]@0.5 * a = b", FUZZY), s=FUZZY)
    assert entails(st_, (), c("[c(b)]@0.5", FUZZY), Mode.SELL, FUZZY)
    with pytest.raises(StoreError):
        add(store_of(s=FUZZY), Soft((Atom("eq", (Const("a"), Const("b"))),), FUZZY.value(Fraction(1, 2))), FUZZY)


def test_axioms_forward_chain():
    ax = Axiom(("X",), c("[c(X)]@0.5", FUZZY), c("[e(X)]@0.7", FUZZY))
    st_ = store_of(c("[c(a)]@0.6 * [c(b)]@0.2", FUZZY), s=FUZZY)
    # the conclusion arrives at its own level once the premise is met
    assert entails(st_, (ax,), c("[e(a)]@0.7", FUZZY), Mode.SELL, FUZZY)
    assert not entails(st_, (ax,), c("[e(a)]@0.8", FUZZY), Mode.SELL, FUZZY)
    assert not entails(st_, (ax,), c("[e(b)]@0.1", FUZZY), Mode.SELL, FUZZY)


def test_one_is_always_entailed():
    assert entails(store_of(s=FUZZY), (), c("1", FUZZY), Mode.SELLS, FUZZY)


def test_trace_records_the_witness():
    trace = []
    st_ = store_of(c("[c]@0.7 * [d]@0.2", PROB), s=PROB)
    assert entails(st_, (), c("[c * d]@0.14", PROB), Mode.SELLS, PROB, trace=trace)
    rec = trace[-1]
    assert rec["verdict"] and rec["items"][0]["bound"] == "0.14"
    assert rec["items"][0]["supports"] == ["0", "1"]


def test_variables_are_not_constants():
    st_ = store_of(Soft((Atom("c", (Var("X"),)),), FUZZY.top), s=FUZZY)
    assert not entails(st_, (), c("[c(a)]@1", FUZZY), Mode.SELL, FUZZY)
