"""The `ordlin` command-line driver.

Subcommands: check, run, elaborate, verify.  Exit codes: 0 on success,
1 on a failed check/run/verification, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from . import machine as M
from . import resources as R
from . import syntax as S
from .affine import (AffineMode, DEFAULT_CONFIG, ExceptionConfig,
                     check_affine)
from .elaborate import elaborate_expression, expr_type, Flavor, translate_type
from .surface import (SurfaceError, parse_program, parse_type, pretty_print,
                      pretty_print_type)
from .typecheck import CheckError, Mode, check_command_typing, check_core
from .verify import (ALL_CHECKS, bundled_corpus_dir, load_program,
                     verify_properties)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ordlin")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="typecheck a program")
    c.add_argument("file")
    c.add_argument("--mode", choices=["ordered", "linear"])
    c.add_argument("--dialect", choices=["core", "affine"])
    c.add_argument("--exc-type", help="exception type for the affine dialect")
    c.add_argument("--new-fail",
                   help="exception value raised on allocation failure")

    r = sub.add_parser("run", help="run a program on a freelist")
    r.add_argument("file")
    r.add_argument("--freelist", default="",
                   help="comma-separated resource names, e.g. 0,1,2")
    r.add_argument("--fuel", type=int, default=100000)
    r.add_argument("--trace", help="write the JSON trace here")
    r.add_argument("--verify", default="",
                   help="per-step checks: typing,resources")
    r.add_argument("--mode", choices=["ordered", "linear"])
    r.add_argument("--dialect", choices=["core", "affine"])

    e = sub.add_parser("elaborate",
                       help="translate an affine program to the core dialect")
    e.add_argument("file")
    e.add_argument("-o", "--output", help="output .ord file (default stdout)")

    v = sub.add_parser("verify", help="run the metatheorem test matrix")
    v.add_argument("--corpus", help="program directory (default: bundled)")
    v.add_argument("--seeds", type=int, default=0,
                   help="number of generation seeds (4 programs each)")
    v.add_argument("--max-freelist", type=int, default=8)
    v.add_argument("--report", help="write the JSON report here")
    return p


def _exc_config(args) -> ExceptionConfig:
    if not getattr(args, "exc_type", None) and not getattr(args, "new_fail", None):
        return DEFAULT_CONFIG
    exc_type = (parse_type(args.exc_type) if args.exc_type
                else DEFAULT_CONFIG.exc_type)
    new_fail = (parse_program(args.new_fail) if args.new_fail
                else DEFAULT_CONFIG.new_fail)
    cfg = ExceptionConfig(exc_type, new_fail)
    cfg.validate()
    return cfg


def _load(args):
    prog = load_program(args.file)
    dialect = getattr(args, "dialect", None) or prog.dialect
    mode = getattr(args, "mode", None) or prog.mode
    if dialect == "affine" and mode in ("ordered", "linear"):
        mode = prog.mode if prog.dialect == "affine" else "withmove"
    if dialect == "core" and mode in ("nomove", "withmove"):
        mode = "ordered"
    if dialect != prog.dialect:
        # reparse under the requested dialect so keywords resolve properly
        expr = parse_program(open(args.file).read(), dialect=dialect)
        prog = prog.__class__(prog.name, dialect, mode, prog.ty, expr)
    else:
        prog = prog.__class__(prog.name, dialect, mode, prog.ty, prog.expr)
    return prog


def _cmd_check(args) -> int:
    prog = _load(args)
    try:
        if prog.dialect == "affine":
            check_affine((), prog.expr, prog.ty,
                         amode=AffineMode(prog.mode), cfg=_exc_config(args))
        else:
            check_core((), prog.expr, prog.ty, Mode(prog.mode))
    except CheckError as exc:
        print(f"{prog.name}: {exc}", file=sys.stderr)
        return 1
    print(f"{prog.name}: ok at {pretty_print_type(prog.ty)} "
          f"({prog.dialect}/{prog.mode})")
    return 0


def _parse_freelist(text: str) -> tuple[int, ...]:
    if not text.strip():
        return ()
    return tuple(int(part) for part in text.split(","))


def _cmd_run(args) -> int:
    prog = _load(args)
    freelist = _parse_freelist(args.freelist)
    try:
        if prog.dialect == "affine":
            cfg = DEFAULT_CONFIG
            d = check_affine((), prog.expr, prog.ty,
                             amode=AffineMode(prog.mode), cfg=cfg)
            core = S.Proj(1, S.Ascribe(elaborate_expression(d, cfg),
                                       expr_type(prog.ty, cfg)))
            ty = translate_type(prog.ty, Flavor.NEG, cfg)
            mode = Mode.LINEAR
        else:
            core, ty, mode = prog.expr, prog.ty, Mode(prog.mode)
        typed = check_core((), core, ty, mode)
    except CheckError as exc:
        print(f"{prog.name}: {exc}", file=sys.stderr)
        return 1
    outcome, trace = M.run(typed, freelist, args.fuel)
    if args.trace:
        M.write_trace(trace, args.trace)
    code = 0
    for check in filter(None, args.verify.split(",")):
        if check == "typing":
            cache: dict = {}
            for entry in trace:
                try:
                    check_command_typing(entry.command, ty, mode, cache)
                except CheckError as exc:
                    print(f"step {entry.step}: {exc}", file=sys.stderr)
                    code = 1
        elif check == "resources":
            cache = {}
            seen = set()
            for entry in trace:
                try:
                    seen.add(R.command_resources(entry.command, mode, cache))
                except (R.NotDerivable, R.LinearityViolation) as exc:
                    print(f"step {entry.step}: {exc}", file=sys.stderr)
                    code = 1
            if len(seen) > 1:
                print(f"resource list not preserved: {sorted(seen)}",
                      file=sys.stderr)
                code = 1
        else:
            print(f"unknown --verify check: {check}", file=sys.stderr)
            return 2
    if isinstance(outcome, M.Final):
        print(f"final: {pretty_print(outcome.value)} "
              f"freelist: {list(outcome.freelist)}")
        return code
    print(f"{prog.name}: {outcome}", file=sys.stderr)
    return 1


def _cmd_elaborate(args) -> int:
    prog = _load(args)
    if prog.dialect != "affine":
        print(f"{prog.name}: already a core program", file=sys.stderr)
        return 1
    cfg = DEFAULT_CONFIG
    try:
        d = check_affine((), prog.expr, prog.ty,
                         amode=AffineMode(prog.mode), cfg=cfg)
    except CheckError as exc:
        print(f"{prog.name}: {exc}", file=sys.stderr)
        return 1
    core = S.Proj(1, S.Ascribe(elaborate_expression(d, cfg),
                               expr_type(prog.ty, cfg)))
    ty = translate_type(prog.ty, Flavor.NEG, cfg)
    text = (f"-- elaborated from {prog.name} ({prog.mode})\n"
            f"-- dialect: core\n"
            f"-- mode: linear\n"
            f"-- type: {pretty_print_type(ty)}\n"
            f"{pretty_print(core)}\n")
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_verify(args) -> int:
    corpus = args.corpus if args.corpus else bundled_corpus_dir()
    report = verify_properties(corpus, seeds=args.seeds,
                               max_freelist=args.max_freelist)
    for rec in report.records:
        status = "ok" if rec.ok else "FAIL"
        print(f"{status:4} {rec.name:24} {rec.dialect}/{rec.mode:9} "
              f"{rec.final_freelist_verdict:11} {rec.steps:6} steps")
    print(f"{'all ok' if report.all_ok else 'FAILURES'}: "
          f"{len(report.records)} programs")
    if args.report:
        report.write(args.report)
    return 0 if report.all_ok else 1


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        handler = {"check": _cmd_check, "run": _cmd_run,
                   "elaborate": _cmd_elaborate, "verify": _cmd_verify}
        return handler[args.command](args)
    except (SurfaceError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
