import json
import random
from fractions import Fraction

import jsonschema
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from softccp.frontend.syntax import parse_constraint, parse_formula, parse_program, parse_sequent, parse_process
from softccp.kernel import Atom, Definition, Var
from softccp.prover import Bang, Forall, Lolli, One, Sequent, Signature, Special, Tensor, check_promotion, prove
from softccp.prover.encode import encode, encode_process
from softccp.prover.harness import _levels, _random_formula, adequacy_check, cut_check, nonprovability_suite
from softccp.prover.search import ProofTree
from softccp.prover.validate import InvalidProof, is_valid, validate
from softccp.schemas import load
from softccp.semiring import CRISP, FUZZY, PROB, WEIGHTED
from softccp.store import Mode

P, D, U, BOTC, TOPC = Special.P, Special.D, Special.U, Special.BOT_C, Special.TOP_C


def seq(text):
    return parse_sequent(text)


def proves(text, mode=Mode.SELL, depth=10):
    s, sem, _ = seq(text)
    sig = Signature(sem)
    r = prove(s, sig, mode, depth)
    if r.proof is not None:
        validate(r.proof, sig, mode, s.context, s.goal)
    return r


def lv(s, x):
    return s.parse(x)


# -- promotion side condition ------------------------------------------------


def test_promotion_examples():
    sig = Signature(PROB)
    ctx = [lv(PROB, "0.7"), lv(PROB, "0.2")]
    assert not check_promotion(ctx, lv(PROB, "0.2"), Mode.SELLS, sig)
    assert check_promotion(ctx, lv(PROB, "0.14"), Mode.SELLS, sig)
    assert check_promotion(ctx, lv(PROB, "0.2"), Mode.SELL, sig)
    a = lv(FUZZY, "0.4")
    assert check_promotion([a], a, Mode.SELL, Signature(FUZZY))


def test_signature_completion():
    sig = Signature(FUZZY)
    half = lv(FUZZY, "0.5")
    for x, y in [(P, D), (D, P), (P, U), (U, D), (P, half), (half, D)]:
        assert not sig.leq(x, y)
    for x in (P, D, U, half):
        assert sig.leq(BOTC, x) and sig.leq(x, TOPC)
        assert sig.times(x, P if x is not P else D) == BOTC or x is BOTC
    assert {sig.unbounded(i) for i in (U, TOPC, half, FUZZY.bottom)} == {True}
    assert not sig.unbounded(P) and not sig.unbounded(D)


@pytest.mark.parametrize("s", [FUZZY, PROB, WEIGHTED, CRISP], ids=lambda s: s.name)
@given(data=st.data())
def test_sells_condition_implies_sell_condition(s, data):
    sig = Signature(s)
    levels = _levels(s)
    ctx = data.draw(st.lists(st.sampled_from(levels), max_size=4))
    target = data.draw(st.sampled_from(levels))
    if check_promotion(ctx, target, Mode.SELLS, sig):
        assert check_promotion(ctx, target, Mode.SELL, sig)
    if s.idempotent_times:
        assert check_promotion(ctx, target, Mode.SELLS, sig) == check_promotion(ctx, target, Mode.SELL, sig)


# -- search --------------------------------------------------------------------


def test_bundle_under_topc():
    r = proves("semiring prob; !topc (!0.7 c * !0.7 d) |- !0.5 c * !0.7 d")
    # the bundle is classical, so it is copied and split before each promotion
    assert r.found and {"copy", "tensor_L", "bang_R"} <= set(r.proof.rules())


def test_one_right():
    r = proves("semiring fuzzy; |- 1")
    assert r.found and r.proof.rule == "one_R"


def test_fuzzy_promotion_would_weaken():
    r = proves("semiring fuzzy; !0.7 c, !0.2 d |- !0.5 (!0.5 c * !0.5 d)")
    assert not r.found and not r.truncated


def test_empty_context_cannot_prove_a_bang():
    r = proves("semiring fuzzy; |- !0.5 c")
    assert not r.found and not r.truncated


@pytest.mark.parametrize("a,sells", [("0.14", True), ("0.1", True), ("0.15", False), ("0.2", False)])
def test_probabilistic_split(a, sells):
    text = f"semiring prob; !0.7 c, !0.2 d |- !{a} (c * d)"
    assert proves(text, Mode.SELLS).found is sells
    assert proves(text, Mode.SELL).found


def test_weighted():
    assert proves("semiring weighted; !-2 c1, !-7 c2 |- !-9 (c1 * c2)", Mode.SELLS).found
    assert not proves("semiring weighted; !-2 c1, !-7 c2 |- !-8 (c1 * c2)", Mode.SELLS).found


def test_linear_resources_are_not_duplicated():
    assert not proves("semiring fuzzy; c |- c * c").found
    assert proves("semiring fuzzy; !0.5 c |- c * c").found
    assert not proves("semiring fuzzy; c, d |- c").found
    assert proves("semiring fuzzy; c, d |- c * top").found


def test_quantifiers():
    assert proves("semiring fuzzy; all X. (c(X) -o d(X)), c(a) |- ex Y. d(Y)").found
    assert not proves("semiring fuzzy; c(a) |- all X. c(X)").found
    assert proves("semiring fuzzy; all X. c(X) |- c(b)").found


def test_with_and_lolli():
    assert proves("semiring fuzzy; c & d |- d").found
    assert proves("semiring fuzzy; c -o d, c |- d").found
    assert proves("semiring fuzzy; c |- d -o c * d").found
    assert not proves("semiring fuzzy; c & d |- c * d").found


def test_labels_p_and_d_are_linear():
    # dereliction works on any label, but p and d never contract and are unrelated
    assert proves("semiring fuzzy; !p (!0.5 c) |- !0.5 c").found
    assert proves("semiring fuzzy; !p c |- !p c").found
    assert not proves("semiring fuzzy; !p c |- c * c").found
    assert not proves("semiring fuzzy; !p c |- !d c").found
    assert not proves("semiring fuzzy; !d c, !d c |- !d c").found


def formulas(s, n=4):
    levels = _levels(s)
    return st.integers(0, 10**9).map(lambda seed: _random_formula(random.Random(seed), levels,
                                                                  [Atom("a"), Atom("b")], n))


@settings(max_examples=60)
@given(data=st.data())
def test_modes_coincide_on_idempotent_semirings(data):
    f = data.draw(st.lists(formulas(FUZZY), min_size=1, max_size=2))
    g = data.draw(formulas(FUZZY))
    sig = Signature(FUZZY)
    a = prove(Sequent(tuple(f), g), sig, Mode.SELL, 6)
    b = prove(Sequent(tuple(f), g), sig, Mode.SELLS, 6)
    if not (a.truncated or b.truncated):
        assert a.found == b.found


@settings(max_examples=60)
@given(data=st.data())
def test_sells_proofs_are_sell_proofs(data):
    f = data.draw(st.lists(formulas(PROB), min_size=1, max_size=2))
    g = data.draw(formulas(PROB))
    sig = Signature(PROB)
    r = prove(Sequent(tuple(f), g), sig, Mode.SELLS, 6)
    if r.proof is not None:
        assert is_valid(r.proof, sig, Mode.SELLS, tuple(f), g)
        assert is_valid(r.proof, sig, Mode.SELL, tuple(f), g)


# -- validator -----------------------------------------------------------------


def retarget(tree: ProofTree, rule, **changes) -> ProofTree:
    if tree.rule == rule:
        return ProofTree(**{**tree.__dict__, **changes})
    return ProofTree(**{**tree.__dict__, "premises": tuple(retarget(p, rule, **changes) for p in tree.premises)})


def test_validator_rejects_tampered_promotion():
    s, sem, _ = seq("semiring prob; !0.7 c, !0.2 d |- !0.14 (c * d)")
    sig = Signature(sem)
    proof = prove(s, sig, Mode.SELLS).proof
    assert is_valid(proof, sig, Mode.SELLS)
    # same tree claiming a 0.2 promotion fails the product condition
    bad = retarget(proof, "bang_R_S", goal=parse_formula("!0.2 (c * d)", PROB))
    assert not is_valid(bad, sig, Mode.SELLS)
    forged = retarget(proof, "bang_R_S", info=(("target", "0.14"), ("levels", ["0.7"]), ("bound", "0.14")))
    with pytest.raises(InvalidProof):
        validate(forged, sig, Mode.SELLS)


def test_validator_rejects_missing_premise():
    s, sem, _ = seq("semiring fuzzy; c, d |- c * d")
    sig = Signature(sem)
    proof = prove(s, sig).proof
    assert is_valid(proof, sig, Mode.SELL, s.context, s.goal)
    assert not is_valid(ProofTree(**{**proof.__dict__, "premises": ()}), sig, Mode.SELL)
    assert not is_valid(proof, sig, Mode.SELL, s.context, parse_formula("d * c * c", FUZZY))


def test_proof_json_matches_schema():
    s, sem, _ = seq("semiring prob; all X. (c(X) -o !0.5 d(X)), !0.7 c(a) |- ex Y. !0.5 d(Y) & 1 -o 1")
    r = prove(s, Signature(sem), Mode.SELLS)
    assert r.found
    doc = json.loads(json.dumps(r.proof.to_json()))
    jsonschema.validate(doc, load("proof"))
    assert doc["rule"] and r.proof.size() >= r.proof.height()


# -- encoding ------------------------------------------------------------------


def test_encode_tell():
    assert encode(parse_process("tell [c]@0.7", FUZZY)) == Bang(P, Bang(lv(FUZZY, "0.7"), Atom("c")))


def test_encode_par():
    p, q = parse_process("tell [c]@0.7", FUZZY), parse_process("tell [d]@0.2", FUZZY)
    assert encode(parse_process("tell [c]@0.7 || tell [d]@0.2", FUZZY)) == Tensor(encode(p), encode(q))


def test_encode_definition():
    d = Definition("q", ("X",), parse_process("tell [c(X)]@0.5", FUZZY))
    body = Lolli(Bang(D, Atom("q", (Var("X"),))), Bang(P, Bang(lv(FUZZY, "0.5"), Atom("c", (Var("X"),)))))
    assert encode(d) == Bang(U, Forall("X", body))


def test_encode_skip_and_sum():
    assert encode_process(parse_process("skip", FUZZY)) == One()
    f = encode_process(parse_process("ask [c]@0.3 then q + ask [d]@1 then r", FUZZY))
    assert f.index is P and len(f.body.parts) == 2


# -- adequacy, cut, non-provability ---------------------------------------------


def adequacy(text, goal):
    prog = parse_program(text)
    return adequacy_check(prog, parse_constraint(goal, prog.semiring), 10, 100)


def test_adequacy_on_t():
    from programs import T

    r = adequacy(T, "[c]@0.3")
    assert (r.barb, r.provable, r.agree) == (True, True, True)


def test_adequacy_trivial():
    r = adequacy("semiring fuzzy; mode sell; main = tell 1;", "1")
    assert (r.barb, r.provable, r.agree) == (True, True, True)


def test_adequacy_blocked_ask():
    r = adequacy("semiring fuzzy; mode sell; main = ask [c]@0.5 then tell [d]@0.5;", "[d]@0.5")
    assert (r.barb, r.provable, r.agree) == (False, False, True)


def test_cut_over_promotions():
    # left premise promotes to 0.35 = 0.7 x 0.5, right premise to 0.28 = 0.8 x 0.35
    sig = Signature(PROB)
    f = lambda t: parse_formula(t, PROB)  # noqa: E731
    left = (f("!0.7 c"), f("!0.5 d"))
    right = (f("!0.8 e"),)
    s = Sequent(left + right, f("!0.28 (e * (c * d))"))
    r = cut_check(s, f("!0.35 (c * d)"), (left, right), sig, Mode.SELLS, depth=8)
    assert r.premises_provable and r.cut_free


def test_cut_on_one():
    sig = Signature(FUZZY)
    s = Sequent((parse_formula("c", FUZZY),), parse_formula("c", FUZZY))
    r = cut_check(s, One(), ((), s.context), sig, Mode.SELL)
    assert r.premises_provable and r.cut_free


def test_weakening_a_definition_changes_nothing():
    s, sem, _ = seq("semiring fuzzy; !1 (all X. (!0.5 c(X) -o !0.5 d(X))), !0.7 c(a) |- !0.5 d(a)")
    sig = Signature(sem)
    d = encode(Definition("f", (), parse_process("tell [d(a)]@1", FUZZY)))
    with_def = prove(Sequent(s.context + (d,), s.goal), sig)
    assert with_def.found == prove(s, sig).found == True  # noqa: E712


def test_nonprovability_without_tells():
    rep = nonprovability_suite(FUZZY, samples=10, seed=3, tells=False, depth=6)
    assert not rep.provable and not rep.mismatches


def test_unknown_index_rejected():
    s = Sequent((), Bang(lv(PROB, "0.5"), Atom("c")))
    with pytest.raises(Exception):
        prove(s, Signature(FUZZY))


def test_levels_are_exact():
    assert lv(PROB, "0.14").num == Fraction(7, 50)
