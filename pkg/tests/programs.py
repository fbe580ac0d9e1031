"""Hand-written programs shared by the interpreter, prover and acceptance tests."""

T = """
semiring fuzzy; mode sell;
def q1 = skip; def r1 = skip; def s1 = skip;
main = tell [c]@0.7 || tell [d]@0.2
    || ask [c]@0.3 then q1
    || ask [c * d]@0.5 then r1
    || ask [c * d]@0.2 then s1;
"""

# (name, program text, observed constraint, expected barb)
ADEQUACY = [
    ("tell", "semiring fuzzy; mode sell; main = tell [c]@0.7;", "[c]@0.5", True),
    ("tell-too-strong", "semiring fuzzy; mode sell; main = tell [c]@0.7;", "[c]@0.8", False),
    ("skip", "semiring fuzzy; mode sell; main = skip;", "1", True),
    ("skip-no-atom", "semiring fuzzy; mode sell; main = skip;", "[c]@0.1", False),
    ("two-tells-fuzzy", "semiring fuzzy; mode sell; main = tell [c]@0.7 || tell [d]@0.2;",
     "[c * d]@0.2", True),
    ("two-tells-fuzzy-high", "semiring fuzzy; mode sell; main = tell [c]@0.7 || tell [d]@0.2;",
     "[c * d]@0.5", False),
    ("prob-product", "semiring prob; mode sells; main = tell [c]@0.7 || tell [d]@0.2;",
     "[c * d]@0.14", True),
    ("prob-product-high", "semiring prob; mode sells; main = tell [c]@0.7 || tell [d]@0.2;",
     "[c * d]@0.15", False),
    ("weighted-sum", "semiring weighted; mode sells; main = tell [c1]@-2 || tell [c2]@-7;",
     "[c1 * c2]@-9", True),
    ("weighted-sum-high", "semiring weighted; mode sells; main = tell [c1]@-2 || tell [c2]@-7;",
     "[c1 * c2]@-8", False),
    ("ask-fires", "semiring fuzzy; mode sell; main = tell [c]@0.7 || ask [c]@0.3 then tell [e]@1;",
     "[e]@1", True),
    ("ask-blocked", "semiring fuzzy; mode sell; main = tell [c]@0.2 || ask [c]@0.3 then tell [e]@1;",
     "[e]@0.1", False),
    ("choice", "semiring fuzzy; mode sell; "
     "main = tell [c]@0.5 || (ask [c]@0.3 then tell [e]@1 + ask [c]@0.9 then tell [f]@1);",
     "[e]@1", True),
    ("choice-blocked-branch", "semiring fuzzy; mode sell; "
     "main = tell [c]@0.5 || (ask [c]@0.3 then tell [e]@1 + ask [c]@0.9 then tell [f]@1);",
     "[f]@1", False),
    ("local", "semiring fuzzy; mode sell; main = new X in tell [c(X)]@1;", "ex Y. [c(Y)]@1", True),
    ("local-is-hidden", "semiring fuzzy; mode sell; main = new X in tell [c(X)]@1;", "[c(a)]@1", False),
    ("call", "semiring fuzzy; mode sell; def p(X) = tell [c(X)]@0.6; main = p(a);", "[c(a)]@0.6", True),
    ("call-other-arg", "semiring fuzzy; mode sell; def p(X) = tell [c(X)]@0.6; main = p(a);",
     "[c(b)]@0.1", False),
    ("recursion-chain", "semiring fuzzy; mode sell; "
     "def p(X) = ask [n(X)]@1 then tell [v]@1; "
     "def q = tell [n(a)]@1 || p(a); main = q;", "[v]@1", True),
    ("recursion-walk", "semiring crisp; mode sell; "
     "def walk(X) = ask [next(X, b)]@true then (tell [seen(X)]@true || walk(b)) "
     "+ ask [last(X)]@true then tell [done]@true; "
     "main = tell ([next(a, b)]@true * [last(b)]@true) || walk(a);",
     "[done]@true", True),
    ("recursion-walk-unreached", "semiring crisp; mode sell; "
     "def walk(X) = ask [next(X, b)]@true then (tell [seen(X)]@true || walk(b)) "
     "+ ask [last(X)]@true then tell [done]@true; "
     "main = tell [next(a, b)]@true || walk(a);",
     "[done]@true", False),
    ("axiom", "semiring fuzzy; mode sell; axiom forall X. [c(X)]@0.5 -> [e(X)]@0.7; "
     "main = tell [c(a)]@0.6;", "[e(a)]@0.7", True),
    ("axiom-premise-too-weak", "semiring fuzzy; mode sell; axiom forall X. [c(X)]@0.5 -> [e(X)]@0.7; "
     "main = tell [c(a)]@0.4;", "[e(a)]@0.1", False),
    ("crisp-sync", "semiring crisp; mode sell; "
     "main = ask [c]@true then tell [d]@true || ask [d]@true then tell [e]@true || tell [c]@true;",
     "[e]@true", True),
    ("running-example-r-blocked", T, "[c * d]@0.5", False),
]
