"""Command-line interface.

Exit codes: 0 a verdict was produced, 1 the answer was truncated or
inconclusive (or a law check failed), 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .. import kernel as k
from ..interpreter import (
    DEFAULT_MAX_STEPS,
    Configuration,
    barb,
    explore,
    random_trace,
    step,
)
from ..laws import check_laws
from ..prover.formulas import Signature
from ..prover.harness import adequacy_check
from ..prover.search import DEFAULT_DEPTH, prove
from ..prover.validate import validate
from ..semiring import SEMIRINGS, SemiringError, format_value, get_semiring
from ..store import DEFAULT_BOUND, Mode, entails, store_of
from .syntax import ParseError, Parser, parse_constraint, parse_program, parse_sequent

OK, TRUNCATED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _program(args):
    s = get_semiring(args.semiring) if args.semiring else None
    mode = Mode.parse(args.mode) if args.mode else None
    return parse_program(_read(args.file), s, mode)


def config_json(g: Configuration) -> dict:
    return {
        "hidden": sorted(g.hidden),
        "procs": [k.show(p) for p in g.procs],
        "store": [{"atom": str(a), "level": format_value(lv)} for a, lv, _ in g.store.items],
    }


def cmd_run(args, out) -> int:
    prog = _program(args)
    if args.strategy == "random":
        tr = random_trace(prog, args.seed, args.max_steps)
        if args.json:
            print(json.dumps(tr.to_json(), indent=2), file=out)
        else:
            print(f"start: {tr.initial}", file=out)
            for s in tr.steps:
                print(f"{s.tag:>8}  {s.target}", file=out)
            if tr.truncated:
                print("(truncated)", file=out)
        return TRUNCATED if tr.truncated else OK
    rs = explore(prog, args.max_steps)
    final = [g for g in rs.configs if not step(prog, g)]
    if args.json:
        print(json.dumps({"reachable": len(rs), "final": [config_json(g) for g in final],
                          "truncated": rs.truncated}, indent=2), file=out)
    else:
        print(f"reachable configurations: {len(rs)}", file=out)
        for g in final:
            print(f"final: {g}", file=out)
        if rs.truncated:
            print("(truncated)", file=out)
    return TRUNCATED if rs.truncated else OK


def cmd_barb(args, out) -> int:
    prog = _program(args)
    goal = parse_constraint(args.goal, prog.semiring)
    r = barb(prog, goal, args.max_steps)
    if r.found:
        print("true", file=out)
        return OK
    print("truncated" if r.truncated else "false", file=out)
    return TRUNCATED if r.truncated else OK


def _axioms(texts, s):
    out = []
    for text in texts or ():
        p = Parser(f"axiom {text};", s)
        out.extend(p.program().program.axioms)
    return tuple(out)


def cmd_entail(args, out) -> int:
    s = get_semiring(args.semiring)
    mode = Mode.parse(args.mode or "sell")
    store = parse_constraint(args.store, s) if args.store else k.One()
    goal = parse_constraint(args.goal, s)
    axioms = _axioms(args.axiom, s)
    trace: list = []
    verdict = entails(store_of(store, s=s), axioms, goal, mode, s, args.bound, trace)
    if args.trace:
        print(json.dumps({"verdict": verdict, "mode": mode.value, "semiring": s.name,
                          "trace": trace[-1]}, indent=2), file=out)
    else:
        print("true" if verdict else "false", file=out)
    return OK


def cmd_prove(args, out) -> int:
    s = get_semiring(args.semiring) if args.semiring else None
    seq, s, fmode = parse_sequent(_read(args.sequent), s)
    mode = Mode.parse(args.mode) if args.mode else (fmode or Mode.SELL)
    sig = Signature(s)
    r = prove(seq, sig, mode, args.depth)
    if r.proof is None:
        print("NOT-PROVED (truncated)" if r.truncated else "NOT-PROVED", file=out)
        return TRUNCATED if r.truncated else OK
    validate(r.proof, sig, mode, seq.context, seq.goal)
    if args.json:
        print(json.dumps(r.proof.to_json(), indent=2), file=out)
    else:
        print("PROVED", file=out)
        print(r.proof.pretty(), file=out)
    return OK


def cmd_check_laws(args, out) -> int:
    names = [args.semiring] if args.semiring else list(SEMIRINGS)
    ok = True
    for name in names:
        rep = check_laws(get_semiring(name), args.samples, args.seed)
        for law, n in rep.checked.items():
            bad = len(rep.failures[law])
            ok &= bad == 0
            print(f"{rep.semiring:9} {law:6} {'pass' if bad == 0 else 'FAIL'} ({n} samples, {bad} failures)",
                  file=out)
    return OK if ok else TRUNCATED


def cmd_adequacy(args, out) -> int:
    prog = _program(args)
    goal = parse_constraint(args.goal, prog.semiring)
    r = adequacy_check(prog, goal, args.depth, args.max_steps)
    print(f"barb={str(r.barb).lower()} provable={str(r.provable).lower()} "
          f"agree={str(r.agree).lower()}"
          + (" (barb truncated)" if r.barb_truncated else "")
          + (" (prover truncated)" if r.prover_truncated else ""), file=out)
    return TRUNCATED if r.inconclusive else OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="softccp", description="Soft concurrent constraint programming toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def program_args(p):
        p.add_argument("file", help="program file (.sccp)")
        p.add_argument("--semiring", help="override the program's semiring")
        p.add_argument("--mode", choices=["sell", "sells"], help="override the program's mode")
        p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)

    p = sub.add_parser("run", help="execute a program")
    program_args(p)
    p.add_argument("--strategy", choices=["exhaustive", "random"], default="exhaustive")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("barb", help="can the program output a constraint?")
    program_args(p)
    p.add_argument("--goal", required=True)
    p.set_defaults(func=cmd_barb)

    p = sub.add_parser("entail", help="decide store |- goal")
    p.add_argument("--semiring", required=True)
    p.add_argument("--mode", choices=["sell", "sells"], default="sell")
    p.add_argument("--store", default="")
    p.add_argument("--goal", required=True)
    p.add_argument("--axiom", action="append", help="'[forall X.] c -> d' (repeatable)")
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_entail)

    p = sub.add_parser("prove", help="search for a proof of a sequent")
    p.add_argument("--sequent", required=True, help="file holding 'F, ... |- G'")
    p.add_argument("--semiring")
    p.add_argument("--mode", choices=["sell", "sells"])
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("check-laws", help="sample the c-semiring axioms")
    p.add_argument("--semiring")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check_laws)

    p = sub.add_parser("adequacy", help="compare the barb with provability of the encoding")
    program_args(p)
    p.add_argument("--goal", required=True)
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.set_defaults(func=cmd_adequacy)
    return ap


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    try:
        return args.func(args, out)
    except (ParseError, SemiringError, UsageError, ValueError) as e:
        print(f"error: {e}", file=err)
        return USAGE


if __name__ == "__main__":
    raise SystemExit(main())
