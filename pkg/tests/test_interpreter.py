import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from programs import T
from softccp.frontend.syntax import parse_constraint, parse_program
from softccp.interpreter import (
    Configuration,
    Exhaustive,
    Program,
    RandomWalk,
    barb,
    canonical_key,
    explore,
    observe,
    random_trace,
    run,
    step,
    validate_step,
)
from softccp.kernel import Call, Const, Definition, Local, Skip, Sum, Tell, show
from softccp.prover.harness import random_process
from softccp.semiring import FUZZY
from softccp.store import Mode, entails


def final_state(prog):
    return [g for g in explore(prog, 20).configs if not step(prog, g)]


def test_t_reaches_the_displayed_configuration():
    prog = parse_program(T)
    rs = explore(prog, 10)
    assert not rs.truncated
    r_guard = parse_constraint("[c * d]@0.5", FUZZY)
    hits = []
    for g in rs:
        assert not entails(g.store, (), r_guard, Mode.SELL, FUZZY)
        pending = Counter(show(p) for p in g.procs)
        store = sorted((str(a), str(lv)) for a, lv, _ in g.store.items)
        if pending == Counter(["q1", "ask [c * d]@0.5 then r1", "s1"]) and store == [("c", "0.7"), ("d", "0.2")]:
            hits.append(g)
    assert hits


def test_t_quiescent_state():
    prog = parse_program(T)
    (g,) = final_state(prog)
    assert [show(p) for p in g.procs] == ["ask [c * d]@0.5 then r1"]


def test_every_edge_passes_the_single_rule_checker():
    prog = parse_program(T)
    g = Configuration.initial(prog)
    seen = 0
    frontier = [g]
    while frontier:
        g = frontier.pop()
        for s in step(prog, g):
            assert validate_step(prog, g, s), (str(g), s.rule)
            frontier.append(s.target)
            seen += 1
    assert seen > 20


def random_program(seed):
    rng = random.Random(seed)
    levels = [FUZZY.parse(x) for x in ("0.2", "0.5", "0.7", "1")]
    main = random_process(rng, levels, ["c", "d"], ["a", "b"], depth=3)
    defs = (
        Definition("r", ("X",), Tell(parse_constraint("[c(X)]@0.5", FUZZY))),
        Definition("w", ("X",), Local("Y", Tell(parse_constraint("[d(X) * d(Y)]@0.7", FUZZY)))),
    )
    return Program(FUZZY, Mode.SELL, (), defs, main)


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_random_steps_are_valid(seed):
    prog = random_program(seed)
    tr = random_trace(prog, seed, 30)
    g = tr.initial
    for s in tr.steps:
        assert validate_step(prog, g, s)
        g = s.target


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_entailment_is_monotone_along_traces(seed):
    prog = random_program(seed)
    goals = [parse_constraint(t, FUZZY) for t in
             ("[c(a)]@0.5", "[c(b)]@0.2", "[d(a)]@0.7", "ex X. [d(X)]@0.7", "[c(a) * d(a)]@0.5", "1")]
    prev = None
    for g in random_trace(prog, seed, 30).configurations():
        now = [observe(prog, g, c) for c in goals]
        if prev is not None:
            assert all(n or not p for p, n in zip(prev, now))
        prev = now


def test_random_trace_is_reproducible():
    prog = parse_program(T)
    a = random_trace(prog, seed=5).to_json()
    assert a == random_trace(prog, seed=5).to_json()
    assert run(prog, RandomWalk(5)).to_json() == a
    assert len(run(prog, Exhaustive(10))) == len(explore(prog, 10))


def test_local_hides_its_variable():
    prog = parse_program("semiring fuzzy; mode sell; main = new X in tell [c(X)]@1 || tell [c(X)]@0.5;")
    (g,) = final_state(prog)
    assert len(g.hidden) == 1
    assert barb(prog, parse_constraint("ex Y. [c(Y)]@1", FUZZY))
    # the free X is a different name from the hidden one
    assert barb(prog, parse_constraint("[c(X)]@0.5", FUZZY))
    assert not barb(prog, parse_constraint("[c(X)]@1", FUZZY))


def test_local_renames_on_clash():
    prog = Program(FUZZY, Mode.SELL, main=Skip())
    g = Configuration(frozenset({"X"}), (Local("X", Tell(parse_constraint("[c(X)]@1", FUZZY))),),
                      Configuration.initial(prog).store)
    (s,) = step(prog, g)
    assert len(s.target.hidden) == 2 and validate_step(prog, g, s)


def test_alpha_equivalent_configurations_share_a_key():
    prog = Program(FUZZY, Mode.SELL)
    c = parse_constraint("[c(X)]@1", FUZZY)
    st0 = Configuration.initial(prog).store
    g1 = Configuration(frozenset({"X"}), (Tell(c), Call("p")), st0)
    g2 = Configuration(frozenset({"Z"}), (Call("p"), Tell(parse_constraint("[c(Z)]@1", FUZZY))), st0)
    assert canonical_key(g1) == canonical_key(g2)


def test_nonterminating_program_is_truncated():
    prog = parse_program("semiring fuzzy; mode sell; def loop = new X in (tell [c(X)]@1 || loop); main = loop;")
    r = barb(prog, parse_constraint("[d]@1", FUZZY), max_steps=15)
    assert not r.found and r.truncated
    assert barb(prog, parse_constraint("ex Y. [c(Y)]@1", FUZZY), max_steps=15).found


def test_blocked_choice_offers_only_enabled_branches():
    prog = parse_program("semiring fuzzy; mode sell; "
                         "main = tell [c]@0.5 || (ask [c]@0.3 then tell [e]@1 + ask [c]@0.9 then tell [f]@1);")
    g = Configuration.initial(prog)
    (told,) = [s for s in step(prog, g) if s.rule == "TELL"]
    sums = [s for s in step(prog, told.target) if s.rule == "SUM"]
    assert [s.branch for s in sums] == [0]
    assert isinstance(told.target.procs[0], Sum)


def test_unknown_call_raises():
    prog = Program(FUZZY, Mode.SELL, main=Call("nope", (Const("a"),)))
    with pytest.raises(Exception):
        step(prog, Configuration.initial(prog))
