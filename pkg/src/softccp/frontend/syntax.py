"""Lexer, parser and printer for programs, constraints and sequents.

Program files::

    semiring fuzzy;  mode sell;
    axiom forall X. [c(X)]@0.5 -> [d(X)]@0.5;
    def p(X) = ask [c(X)]@0.3 then tell [e(X)]@1;
    main = tell [c(a)]@0.7 || p(a);

``||`` binds weakest, then ``+`` between ask branches; the body of an ask is a
single process (parenthesise compositions).  Variables start upper-case.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .. import kernel as k
from ..interpreter import Program
from ..kernel import (
    Atom,
    Axiom,
    Call,
    Const,
    Definition,
    Fun,
    Local,
    Par,
    Skip,
    Soft,
    Sum,
    Tell,
    Var,
)
from ..prover import formulas as fm
from ..prover.search import Sequent
from ..semiring import CSemiring, SemiringError, get_semiring
from ..store import DEFAULT_BOUND, Mode


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+) |
    (?P<nl>\n) |
    (?P<comment>[%\#][^\n]*) |
    (?P<sym>\|\||\|-|-o|->|[\[\]()@*+,.;=!&]) |
    (?P<num>-inf|-?\d+(?:\.\d+)?(?:/\d+)?) |
    (?P<var>[A-Z][A-Za-z0-9_']*) |
    (?P<ident>[a-z][A-Za-z0-9_']*) |
    (?P<bad>.)
""", re.VERBOSE)

KEYWORDS = {"semiring", "mode", "axiom", "forall", "def", "main", "tell", "ask", "then",
            "new", "in", "skip", "ex", "all", "top"}


def tokenize(text: str) -> list:
    out = []
    line, start = 1, 0
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        col = m.start() - start + 1
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind == "bad":
            msg = "names starting with '_' are reserved" if m.group() == "_" else f"unexpected character {m.group()!r}"
            raise ParseError(msg, line, col)
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), line, col))
    out.append(Token("eof", "", line, len(text) - start + 1))
    return out


class Parser:
    def __init__(self, text: str, semiring: CSemiring | None = None):
        self.toks = tokenize(text)
        self.i = 0
        self.s = semiring

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, n: int = 1) -> Token:
        return self.toks[min(self.i + n, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.text == text and t.kind in ("sym", "ident", "num")

    def take(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.take()

    def error(self, msg: str, tok: Token | None = None):
        t = tok or self.tok
        raise ParseError(msg, t.line, t.col)

    def end(self) -> None:
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}")

    def semiring(self) -> CSemiring:
        if self.s is None:
            self.error("no semiring given (add 'semiring <name>;')")
        return self.s

    # -- terms and atoms ------------------------------------------------------

    def term(self):
        t = self.tok
        if t.kind == "var":
            self.take()
            return Var(t.text)
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.take()
            if self.at("("):
                return Fun(t.text, self.args())
            return Const(t.text)
        self.error(f"expected a term, found {t.text!r}")

    def args(self) -> tuple:
        self.expect("(")
        out = [self.term()]
        while self.at(","):
            self.take()
            out.append(self.term())
        self.expect(")")
        return tuple(out)

    def atom(self) -> Atom:
        t = self.tok
        if t.kind == "var" or (t.kind == "ident" and self.peek().text == "="):
            left = self.term()
            self.expect("=")
            return k.eq(left, self.term())
        if t.kind != "ident" or t.text in KEYWORDS:
            self.error(f"expected a predicate, found {t.text!r}")
        self.take()
        return Atom(t.text, self.args() if self.at("(") else ())

    def level(self):
        t = self.tok
        if t.kind in ("num", "ident") and t.text not in ("then", "in"):
            self.take()
            try:
                return self.semiring().parse(t.text)
            except SemiringError as e:
                self.error(str(e), t)
        self.error(f"expected a level, found {t.text!r}")

    # -- constraints ----------------------------------------------------------

    def constraint(self):
        left = self.cprimary()
        while self.at("*"):
            self.take()
            left = k.Tensor(left, self.cprimary())
        return left

    def cprimary(self):
        t = self.tok
        if self.at("ex"):
            self.take()
            v = self.variable()
            self.expect(".")
            return k.Exists(v, self.constraint())
        if self.at("1"):
            self.take()
            return k.One()
        if self.at("("):
            self.take()
            c = self.constraint()
            self.expect(")")
            return c
        if self.at("["):
            self.take()
            atoms = [self.atom()]
            while self.at("*"):
                self.take()
                atoms.append(self.atom())
            self.expect("]")
            self.expect("@")
            lvl = self.level()
            return self.soft(tuple(atoms), lvl, t)
        if t.kind in ("var", "ident") and self.peek().text == "=":
            a = self.atom()
            return self.soft((a,), self.semiring().top, t)
        self.error(f"expected a constraint, found {t.text or 'end of input'!r}")

    def soft(self, atoms, lvl, t) -> Soft:
        for a in atoms:
            if a.is_eq and lvl != self.semiring().top:
                self.error(f"equality must be told at the top level, not {lvl}", t)
        return Soft(atoms, lvl)

    def variable(self) -> str:
        t = self.tok
        if t.kind != "var":
            self.error(f"expected a variable, found {t.text!r}")
        self.take()
        return t.text

    # -- processes -------------------------------------------------------------

    def process(self):
        left = self.psum()
        while self.at("||"):
            self.take()
            left = Par(left, self.psum())
        return left

    def psum(self):
        start = self.tok
        first = self.punit()
        if not self.at("+"):
            return first
        branches = []
        for part in [first] + self._more_branches():
            if not (isinstance(part, Sum) and len(part.branches) == 1):
                self.error("'+' joins ask branches only", start)
            branches.extend(part.branches)
        return Sum(tuple(branches))

    def _more_branches(self) -> list:
        out = []
        while self.at("+"):
            self.take()
            out.append(self.punit())
        return out

    def punit(self):
        t = self.tok
        if self.at("tell"):
            self.take()
            return Tell(self.cprimary())
        if self.at("ask"):
            self.take()
            guard = self.constraint()
            self.expect("then")
            return Sum(((guard, self.punit()),))
        if self.at("new"):
            self.take()
            v = self.variable()
            self.expect("in")
            return Local(v, self.punit())
        if self.at("skip"):
            self.take()
            return Skip()
        if self.at("("):
            self.take()
            p = self.process()
            self.expect(")")
            return p
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.take()
            return Call(t.text, self.args() if self.at("(") else ())
        self.error(f"expected a process, found {t.text or 'end of input'!r}")

    # -- programs --------------------------------------------------------------

    def header(self) -> Mode:
        mode = Mode.SELL
        while self.at("semiring") or self.at("mode"):
            kw = self.take()
            t = self.take()
            try:
                if kw.text == "semiring":
                    self.s = get_semiring(t.text)
                else:
                    mode = Mode.parse(t.text)
            except (SemiringError, ValueError) as e:
                self.error(str(e), t)
            self.expect(";")
        return mode

    def program(self, mode: Mode | None = None) -> "SourceProgram":
        hmode = self.header()
        mode = mode or hmode
        axioms, defs, main = [], [], None
        spans = {}
        while self.tok.kind != "eof":
            t = self.tok
            if self.at("axiom"):
                self.take()
                vs = []
                if self.at("forall"):
                    self.take()
                    vs.append(self.variable())
                    while self.at(","):
                        self.take()
                        vs.append(self.variable())
                    self.expect(".")
                pre = self.constraint()
                self.expect("->")
                con = self.constraint()
                try:
                    axioms.append(Axiom(tuple(vs), pre, con))
                except ValueError as e:
                    self.error(str(e), t)
            elif self.at("def"):
                self.take()
                nt = self.tok
                if nt.kind != "ident" or nt.text in KEYWORDS:
                    self.error("expected a process name")
                self.take()
                params = ()
                if self.at("("):
                    self.take()
                    ps = [self.variable()]
                    while self.at(","):
                        self.take()
                        ps.append(self.variable())
                    self.expect(")")
                    params = tuple(ps)
                self.expect("=")
                body = self.process()
                if any(d.name == nt.text for d in defs):
                    self.error(f"process {nt.text} is defined twice", nt)
                try:
                    defs.append(Definition(nt.text, params, body))
                except ValueError as e:
                    self.error(str(e), nt)
                spans[nt.text] = (nt.line, nt.col)
            elif self.at("main"):
                self.take()
                self.expect("=")
                if main is not None:
                    self.error("main is given twice", t)
                main = self.process()
                spans["main"] = (t.line, t.col)
            else:
                self.error(f"expected 'axiom', 'def' or 'main', found {t.text!r}")
            self.expect(";")
        if main is None:
            main = Skip()
        prog = Program(self.semiring(), mode, tuple(axioms), tuple(defs), main, DEFAULT_BOUND)
        check_program(prog, spans)
        return SourceProgram(prog, spans)

    # -- formulas and sequents -------------------------------------------------

    def formula(self):
        left = self.fwith()
        if self.at("-o"):
            self.take()
            return fm.Lolli(left, self.formula())
        return left

    def fwith(self):
        parts = [self.ftensor()]
        while self.at("&"):
            self.take()
            parts.append(self.ftensor())
        return parts[0] if len(parts) == 1 else fm.With(tuple(parts))

    def ftensor(self):
        left = self.funit()
        while self.at("*"):
            self.take()
            left = fm.Tensor(left, self.funit())
        return left

    def funit(self):
        t = self.tok
        if self.at("ex") or self.at("all"):
            self.take()
            v = self.variable()
            self.expect(".")
            return (fm.Exists if t.text == "ex" else fm.Forall)(v, self.formula())
        if self.at("!"):
            self.take()
            idx = self.index()
            return fm.Bang(idx, self.funit())
        if self.at("("):
            self.take()
            f = self.formula()
            self.expect(")")
            return f
        if self.at("1"):
            self.take()
            return fm.One()
        if self.at("top"):
            self.take()
            return fm.Top()
        return self.atom()

    def index(self):
        t = self.tok
        for sp in fm.Special:
            if t.text == sp.value:
                self.take()
                return sp
        return self.level()

    def sequent(self) -> Sequent:
        ctx = []
        if not self.at("|-"):
            ctx.append(self.formula())
            while self.at(","):
                self.take()
                ctx.append(self.formula())
        self.expect("|-")
        goal = self.formula()
        if self.at(";"):
            self.take()
        return Sequent(tuple(ctx), goal)


@dataclass(frozen=True)
class SourceProgram:
    program: Program
    spans: dict


def check_program(prog: Program, spans: dict | None = None) -> None:
    """Arity clashes, undefined calls and names used both ways."""
    spans = spans or {}
    preds: dict = {}
    procs = {d.name: len(d.params) for d in prog.defs}

    def where(name):
        line, col = spans.get(name, spans.get("main", (0, 0)))
        return line, col

    def see_atom(a: Atom, ctx):
        if a.is_eq:
            return
        if preds.setdefault(a.pred, len(a.args)) != len(a.args):
            raise ParseError(f"predicate {a.pred} used with arities {preds[a.pred]} and {len(a.args)}", *where(ctx))
        if a.pred in procs:
            raise ParseError(f"{a.pred} is both a predicate and a process", *where(ctx))

    def walk_c(c, ctx):
        match c:
            case Soft(atoms, _):
                for a in atoms:
                    see_atom(a, ctx)
            case k.Tensor(l, r):
                walk_c(l, ctx)
                walk_c(r, ctx)
            case k.Exists(_, b):
                walk_c(b, ctx)

    def walk_p(p, ctx):
        match p:
            case Tell(c):
                walk_c(c, ctx)
            case Sum(branches):
                for g, b in branches:
                    walk_c(g, ctx)
                    walk_p(b, ctx)
            case Par(l, r):
                walk_p(l, ctx)
                walk_p(r, ctx)
            case Local(_, b):
                walk_p(b, ctx)
            case Call(name, args):
                if name not in procs:
                    raise ParseError(f"call to undefined process {name}", *where(ctx))
                if procs[name] != len(args):
                    raise ParseError(f"{name} takes {procs[name]} arguments, given {len(args)}", *where(ctx))

    for ax in prog.axioms:
        walk_c(ax.premise, "axiom")
        walk_c(ax.conclusion, "axiom")
    for d in prog.defs:
        walk_p(d.body, d.name)
    walk_p(prog.main, "main")


# ---------------------------------------------------------------------------
# entry points


def parse_program(text: str, semiring: CSemiring | None = None, mode: Mode | None = None) -> Program:
    return Parser(text, semiring).program(mode).program


def parse_source(text: str, semiring: CSemiring | None = None) -> SourceProgram:
    return Parser(text, semiring).program()


def parse_constraint(text: str, semiring: CSemiring) -> k.Constraint:
    p = Parser(text, semiring)
    c = p.constraint()
    p.end()
    return c


def parse_process(text: str, semiring: CSemiring) -> k.Process:
    p = Parser(text, semiring)
    proc = p.process()
    p.end()
    return proc


def parse_formula(text: str, semiring: CSemiring):
    p = Parser(text, semiring)
    f = p.formula()
    p.end()
    return f


def parse_sequent(text: str, semiring: CSemiring | None = None):
    """A sequent, optionally preceded by ``semiring``/``mode`` lines.

    Returns ``(sequent, semiring, mode or None)``.
    """
    p = Parser(text, semiring)
    mode = None
    if p.at("semiring") or p.at("mode"):
        start = p.i
        mode = p.header()
        if not any(t.text == "mode" for t in p.toks[start:p.i]):
            mode = None
    p.semiring()
    seq = p.sequent()
    p.end()
    return seq, p.s, mode


# ---------------------------------------------------------------------------
# printing


def print_constraint(c) -> str:
    return k.show(c)


def print_process(p) -> str:
    return k.show(p)


def print_formula(f) -> str:
    return fm.fmt(f)


def print_sequent(seq: Sequent) -> str:
    return str(seq)


def print_program(prog: Program) -> str:
    lines = [f"semiring {prog.semiring.name};", f"mode {prog.mode.value};"]
    for ax in prog.axioms:
        q = f"forall {', '.join(ax.vars)}. " if ax.vars else ""
        lines.append(f"axiom {q}{k.show(ax.premise)} -> {k.show(ax.conclusion)};")
    for d in prog.defs:
        params = f"({', '.join(d.params)})" if d.params else ""
        lines.append(f"def {d.name}{params} = {k.show(d.body)};")
    lines.append(f"main = {k.show(prog.main)};")
    return "\n".join(lines) + "\n"
