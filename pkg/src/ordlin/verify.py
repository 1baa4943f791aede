"""Corpus loading and the property-verification harness.

Every program is run under a sweep of freelists with per-step checks wired
in: rule determinism, command re-typing, resource-list preservation, and
progress.  The final freelist is compared against the initial one and graded
Identical, Permutation, or Violation; a Violation record carries the full
trace so each report field can be recomputed from it.
"""

from __future__ import annotations

import dataclasses
import json
import pathlib
from dataclasses import dataclass, field
from typing import Optional, Union

from . import machine as M
from . import resources as R
from . import syntax as S
from .affine import AffineMode, DEFAULT_CONFIG, ExceptionConfig, check_affine
from .elaborate import Flavor, elaborate_expression, expr_type, translate_type
from .generate import generate_well_typed
from .surface import parse_program, parse_type, pretty_print_type
from .typecheck import CheckError, Mode, check_command_typing, check_core


@dataclass(frozen=True)
class Program:
    name: str
    dialect: str  # "core" | "affine"
    mode: str     # "ordered" | "linear" | "nomove" | "withmove"
    ty: S.Type
    expr: S.Expr


_DEFAULT_MODE = {"core": "ordered", "affine": "withmove"}


def load_program(path: Union[str, pathlib.Path],
                 name: Optional[str] = None) -> Program:
    path = pathlib.Path(path)
    text = path.read_text()
    directives = {}
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("--") and ":" in stripped:
            key, _, value = stripped[2:].partition(":")
            directives.setdefault(key.strip(), value.strip())
    dialect = directives.get(
        "dialect", "affine" if path.suffix == ".afn" else "core")
    mode = directives.get("affine-mode" if dialect == "affine" else "mode",
                          _DEFAULT_MODE[dialect]).lower()
    ty = parse_type(directives.get("type", "1"))
    expr = parse_program(text, dialect=dialect)
    return Program(name or path.stem, dialect, mode, ty, expr)


def load_corpus(directory: Union[str, pathlib.Path]) -> list[Program]:
    directory = pathlib.Path(directory)
    paths = sorted(directory.glob("*.ord")) + sorted(directory.glob("*.afn"))
    return [load_program(p) for p in paths]


def bundled_corpus_dir() -> pathlib.Path:
    return pathlib.Path(__file__).parent / "corpus"


@dataclass
class ProgramRecord:
    name: str
    mode: str
    dialect: str
    type: str
    freelists: list[list[int]]
    steps: int
    determinism_ok: bool
    subject_reduction_ok: bool
    progress_ok: bool
    resource_list_preserved: bool
    final_freelist_verdict: str  # Identical | Permutation | Violation
    notes: list[str] = field(default_factory=list)
    trace: Optional[list] = None  # full trace of the first violating run

    @property
    def ok(self) -> bool:
        return (self.determinism_ok and self.subject_reduction_ok
                and self.progress_ok and self.resource_list_preserved
                and self.final_freelist_verdict != "Violation")

    def to_json(self) -> dict:
        out = dataclasses.asdict(self)
        if self.trace is None:
            del out["trace"]
        return out


@dataclass
class VerificationReport:
    records: list[ProgramRecord]

    @property
    def all_ok(self) -> bool:
        return all(r.ok for r in self.records)

    def to_json(self) -> dict:
        return {"all_ok": self.all_ok,
                "programs": [r.to_json() for r in self.records]}

    def write(self, path: Union[str, pathlib.Path]):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")


def _value_resources(v: S.Expr) -> list[int]:
    return [s.index for s in S.subexpressions(v) if isinstance(s, S.ResLit)]


def _verdict(initial: tuple[int, ...], outcome: M.Outcome) -> str:
    if not isinstance(outcome, M.Final):
        return "Violation"
    final = list(outcome.freelist) + _value_resources(outcome.value)
    if list(outcome.freelist) == list(initial) and len(final) == len(initial):
        return "Identical"
    if sorted(final) == sorted(initial):
        return "Permutation"
    return "Violation"


def _merge(a: str, b: str) -> str:
    order = ("Identical", "Permutation", "Violation")
    return max(a, b, key=order.index)


def sweep_freelists(max_freelist: int) -> list[tuple[int, ...]]:
    return [tuple(range(k)) for k in range(max_freelist + 1)]


ALL_CHECKS = frozenset({"determinism", "typing", "resources"})


def verify_core(name: str, expr: S.Expr, ty: S.Type, mode: Mode,
                max_freelist: int = 8, fuel: int = 100000,
                dialect: str = "core",
                checks: frozenset = ALL_CHECKS) -> ProgramRecord:
    """Run a checked core program under the freelist sweep with all checks."""
    typed = check_core((), expr, ty, mode)
    rec = ProgramRecord(
        name=name, mode=mode.value, dialect=dialect,
        type=pretty_print_type(ty), freelists=[], steps=0,
        determinism_ok=True, subject_reduction_ok=True, progress_ok=True,
        resource_list_preserved=True, final_freelist_verdict="Identical")
    typing_cache: dict = {}
    resource_cache: dict = {}
    for fl in sweep_freelists(max_freelist):
        rec.freelists.append(list(fl))
        outcome, trace = M.run(typed, fl, fuel)
        rec.steps += len(trace)
        _check_trace(rec, trace, ty, mode, checks,
                     typing_cache, resource_cache)
        if not isinstance(outcome, M.Final):
            rec.progress_ok = False
            rec.notes.append(f"freelist {list(fl)}: {outcome}")
        rec.final_freelist_verdict = _merge(
            rec.final_freelist_verdict, _verdict(fl, outcome))
        if not rec.ok and rec.trace is None:
            rec.trace = M.trace_to_json(trace)
    return rec


def _check_trace(rec: ProgramRecord, trace: M.Trace, ty: S.Type, mode: Mode,
                 checks: frozenset, typing_cache: dict,
                 resource_cache: dict):
    baseline = None
    for entry in trace:
        c = entry.command
        if "determinism" in checks:
            cls = M.classify(c)
            if (len(cls) > 1
                    or (entry.rule is not None and cls != {entry.rule})):
                rec.determinism_ok = False
                rec.notes.append(f"step {entry.step}: rules {sorted(cls)}")
        if "typing" in checks:
            try:
                check_command_typing(c, ty, mode, typing_cache)
            except CheckError as exc:
                rec.subject_reduction_ok = False
                rec.notes.append(f"step {entry.step}: {exc}")
        if "resources" not in checks:
            continue
        try:
            rs = R.command_resources(c, mode, resource_cache)
        except (R.NotDerivable, R.LinearityViolation) as exc:
            rec.resource_list_preserved = False
            rec.notes.append(f"step {entry.step}: {exc}")
            continue
        if baseline is None:
            baseline = rs
        elif rs != baseline:
            rec.resource_list_preserved = False
            rec.notes.append(
                f"step {entry.step}: resources {rs} != {baseline}")


def verify_affine(name: str, expr: S.Expr, ty: S.Type, amode: AffineMode,
                  max_freelist: int = 8, fuel: int = 100000,
                  cfg: ExceptionConfig = DEFAULT_CONFIG,
                  checks: frozenset = ALL_CHECKS) -> ProgramRecord:
    """Elaborate an affine program and verify the core-side properties of
    its translation, plus the expected freelist verdict."""
    d = check_affine((), expr, ty, amode=amode, cfg=cfg)
    core = elaborate_expression(d, cfg)
    prog = S.Proj(1, S.Ascribe(core, expr_type(ty, cfg)))
    neg = translate_type(ty, Flavor.NEG, cfg)
    rec = verify_core(name, prog, neg, Mode.LINEAR, max_freelist, fuel,
                      dialect="affine", checks=checks)
    rec.mode = amode.value
    rec.type = pretty_print_type(ty)
    if amode is AffineMode.NOMOVE:
        # translations of move-free programs stay ordered
        try:
            check_core((), prog, neg, Mode.ORDERED)
        except CheckError as exc:
            rec.subject_reduction_ok = False
            rec.notes.append(f"ordered recheck of translation failed: {exc}")
    return rec


def verify_program(prog: Program, max_freelist: int = 8,
                   fuel: int = 100000,
                   checks: frozenset = ALL_CHECKS) -> ProgramRecord:
    if prog.dialect == "affine":
        amode = AffineMode(prog.mode)
        return verify_affine(prog.name, prog.expr, prog.ty, amode,
                             max_freelist, fuel, checks=checks)
    mode = Mode(prog.mode)
    return verify_core(prog.name, prog.expr, prog.ty, mode, max_freelist,
                       fuel, checks=checks)


_GEN_TARGETS = (S.UNIT, S.Tensor(S.UNIT, S.UNIT), S.Sum(S.UNIT, S.UNIT),
                S.Tensor(S.Sum(S.UNIT, S.UNIT), S.UNIT))

_GEN_MODES = (("ordered", Mode.ORDERED), ("linear", Mode.LINEAR),
              ("nomove", AffineMode.NOMOVE), ("withmove", AffineMode.WITHMOVE))


def generated_programs(seeds: int) -> list[Program]:
    out = []
    for seed in range(seeds):
        target = _GEN_TARGETS[seed % len(_GEN_TARGETS)]
        for label, mode in _GEN_MODES:
            expr = generate_well_typed(seed, mode, target, fuel=40)
            dialect = "affine" if isinstance(mode, AffineMode) else "core"
            out.append(Program(f"gen-{label}-{seed}", dialect, label,
                               target, expr))
    return out


def verify_properties(corpus: Optional[Union[str, pathlib.Path]] = None,
                      seeds: int = 0,
                      max_freelist: int = 8) -> VerificationReport:
    programs = load_corpus(corpus if corpus is not None
                           else bundled_corpus_dir())
    programs += generated_programs(seeds)
    return VerificationReport([verify_program(p, max_freelist)
                               for p in programs])
