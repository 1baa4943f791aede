"""Small-step abstract machine over commands (expression, stack, freelist,
polarity).

The machine runs polarity-annotated terms, i.e. checker output: the let rules
dispatch on the recorded annotation of the bound term.  `classify` matches
every rule independently of `step` so that determinism of the rules is a
tested property, not an artifact of dispatch order.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from . import syntax as S
from .syntax import Polarity

Freelist = tuple[int, ...]


class OpenTerm(Exception):
    pass


@dataclass(frozen=True)
class ArgFrame:
    """A delayed function argument v^ε on the stack."""
    value: S.Expr
    ann: Polarity


@dataclass(frozen=True)
class ProjFrame:
    """A delayed lazy-pair projection π_i^ε on the stack."""
    index: int
    ann: Polarity
    # Full type of the projected pair, recorded for state re-typing.
    with_ty: Optional[S.Type] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class KontFrame:
    """A let continuation (x⁺.u)^ε waiting for a positive value."""
    binder: str
    body: S.Expr
    ann: Polarity
    binder_ty: Optional[S.Type] = field(default=None, compare=False, repr=False)


Frame = Union[ArgFrame, ProjFrame, KontFrame]


@dataclass(frozen=True)
class Command:
    expr: S.Expr
    stack: tuple[Frame, ...]  # top first; empty tuple is the bottom ⋆
    freelist: Freelist
    ann: Polarity


@dataclass(frozen=True)
class Stepped:
    command: Command
    rule_id: str


@dataclass(frozen=True)
class Final:
    value: S.Expr
    freelist: Freelist


@dataclass(frozen=True)
class Stuck:
    diagnostic: str


StepResult = Union[Stepped, Final, Stuck]


@dataclass(frozen=True)
class FuelExhausted:
    command: Command


Outcome = Union[Final, Stuck, FuelExhausted]


@dataclass(frozen=True)
class TraceEntry:
    step: int
    command: Command
    rule: Optional[str]  # rule fired from this state; None when none did


Trace = list[TraceEntry]


def load(e: S.Expr, ty_polarity: Polarity, l: Freelist) -> Command:
    if S.free_vars(e):
        raise OpenTerm(f"free variables {sorted(S.free_vars(e))}")
    return Command(e, (), tuple(l), ty_polarity)


### The reduction rules, one matcher each

FINAL_SHAPES = (S.UnitVal, S.Pair, S.Inj, S.ResLit, S.LazyPair, S.Lam,
                S.NewConst, S.DeleteConst)


def is_final_value(e: S.Expr) -> bool:
    return isinstance(e, FINAL_SHAPES)


def _rule_let_neg(c: Command) -> Optional[Command]:
    e = c.expr
    if (isinstance(e, S.Let) and e.bound_ann is Polarity.NEG
            and e.ann is c.ann):
        return dataclasses.replace(
            c, expr=S.substitute(e.body, e.binder, e.bound))
    return None


def _rule_let_pos(c: Command) -> Optional[Command]:
    e = c.expr
    if (isinstance(e, S.Let) and e.bound_ann is Polarity.POS
            and e.ann is c.ann):
        frame = KontFrame(e.binder, e.body, e.ann,
                          binder_ty=e.bound.ty)
        return Command(e.bound, (frame,) + c.stack, c.freelist, Polarity.POS)
    return None


def _rule_kont(c: Command) -> Optional[Command]:
    if (c.ann is Polarity.POS and S.is_value(c.expr) and c.stack
            and isinstance(c.stack[0], KontFrame)):
        f = c.stack[0]
        return Command(S.substitute(f.body, f.binder, c.expr),
                       c.stack[1:], c.freelist, f.ann)
    return None


def _rule_app_push(c: Command) -> Optional[Command]:
    e = c.expr
    if isinstance(e, S.App) and e.ann is c.ann:
        return Command(e.fn, (ArgFrame(e.arg, e.ann),) + c.stack,
                       c.freelist, Polarity.NEG)
    return None


def _rule_lam_app(c: Command) -> Optional[Command]:
    if (c.ann is Polarity.NEG and isinstance(c.expr, S.Lam) and c.stack
            and isinstance(c.stack[0], ArgFrame)):
        f = c.stack[0]
        return Command(S.substitute(c.expr.body, c.expr.binder, f.value),
                       c.stack[1:], c.freelist, f.ann)
    return None


def _rule_proj_push(c: Command) -> Optional[Command]:
    e = c.expr
    if isinstance(e, S.Proj) and e.ann is c.ann:
        frame = ProjFrame(e.tag, e.ann, with_ty=e.value.ty)
        return Command(e.value, (frame,) + c.stack, c.freelist, Polarity.NEG)
    return None


def _rule_with_proj(c: Command) -> Optional[Command]:
    if (c.ann is Polarity.NEG and isinstance(c.expr, S.LazyPair) and c.stack
            and isinstance(c.stack[0], ProjFrame)):
        f = c.stack[0]
        comp = c.expr.fst if f.index == 1 else c.expr.snd
        return Command(comp, c.stack[1:], c.freelist, f.ann)
    return None


def _rule_delta_pair(c: Command) -> Optional[Command]:
    e = c.expr
    if (isinstance(e, S.MatchPair) and e.ann is c.ann
            and isinstance(e.scrut, S.Pair)):
        body = S.substitute(e.body, e.binder1, e.scrut.fst)
        body = S.substitute(body, e.binder2, e.scrut.snd)
        return dataclasses.replace(c, expr=body)
    return None


def _rule_delta_unit(c: Command) -> Optional[Command]:
    e = c.expr
    if (isinstance(e, S.MatchUnit) and e.ann is c.ann
            and isinstance(e.scrut, S.UnitVal)):
        return dataclasses.replace(c, expr=e.body)
    return None


def _rule_delta_sum(c: Command) -> Optional[Command]:
    e = c.expr
    if (isinstance(e, S.MatchSum) and e.ann is c.ann
            and isinstance(e.scrut, S.Inj)):
        if e.scrut.tag == 1:
            body = S.substitute(e.body1, e.binder1, e.scrut.value)
        else:
            body = S.substitute(e.body2, e.binder2, e.scrut.value)
        return dataclasses.replace(c, expr=body)
    return None


_NEW_RESULT_TY = S.Sum(S.RES, S.UNIT)


def _rule_new_pop(c: Command) -> Optional[Command]:
    if (c.ann is Polarity.NEG and isinstance(c.expr, S.NewConst) and c.stack
            and isinstance(c.stack[0], ArgFrame)
            and isinstance(c.stack[0].value, S.UnitVal) and c.freelist):
        n, rest = c.freelist[0], c.freelist[1:]
        out = S.Inj(1, S.ResLit(n, ty=S.RES), ty=_NEW_RESULT_TY)
        return Command(out, c.stack[1:], rest, Polarity.POS)
    return None


def _rule_new_nil(c: Command) -> Optional[Command]:
    if (c.ann is Polarity.NEG and isinstance(c.expr, S.NewConst) and c.stack
            and isinstance(c.stack[0], ArgFrame)
            and isinstance(c.stack[0].value, S.UnitVal) and not c.freelist):
        out = S.Inj(2, S.UnitVal(ty=S.UNIT), ty=_NEW_RESULT_TY)
        return Command(out, c.stack[1:], (), Polarity.POS)
    return None


def _rule_delete(c: Command) -> Optional[Command]:
    if (c.ann is Polarity.NEG and isinstance(c.expr, S.DeleteConst) and c.stack
            and isinstance(c.stack[0], ArgFrame)
            and isinstance(c.stack[0].value, S.ResLit)):
        n = c.stack[0].value.index
        return Command(S.UnitVal(ty=S.UNIT), c.stack[1:],
                       (n,) + c.freelist, Polarity.POS)
    return None


RULES: list[tuple[str, Callable[[Command], Optional[Command]]]] = [
    ("let-neg", _rule_let_neg),
    ("let-pos", _rule_let_pos),
    ("kont", _rule_kont),
    ("app-push", _rule_app_push),
    ("lam-app", _rule_lam_app),
    ("proj-push", _rule_proj_push),
    ("with-proj", _rule_with_proj),
    ("delta-pair", _rule_delta_pair),
    ("delta-unit", _rule_delta_unit),
    ("delta-sum", _rule_delta_sum),
    ("new-pop", _rule_new_pop),
    ("new-nil", _rule_new_nil),
    ("delete", _rule_delete),
]


def classify(c: Command) -> set[str]:
    """The set of rules whose left-hand side matches c."""
    return {rid for rid, fn in RULES if fn(c) is not None}


def step(c: Command) -> StepResult:
    for rid, fn in RULES:
        nxt = fn(c)
        if nxt is not None:
            return Stepped(nxt, rid)
    if not c.stack and is_final_value(c.expr):
        return Final(c.expr, c.freelist)
    return Stuck(f"no rule matches {describe(c)}")


Hook = Callable[[int, Command, Optional[str]], None]


def run(e: S.Expr, l: Freelist, fuel: int = 100000,
        hooks: Optional[list[Hook]] = None) -> tuple[Outcome, Trace]:
    """Iterate `step` from the loaded command until final, stuck, or out of
    fuel.  The initial polarity comes from the recorded type of e."""
    if e.ty is None:
        raise OpenTerm("cannot run an unchecked term: no recorded type")
    c = load(e, S.polarity(e.ty), tuple(l))
    return run_command(c, fuel, hooks)


def run_command(c: Command, fuel: int = 100000,
                hooks: Optional[list[Hook]] = None) -> tuple[Outcome, Trace]:
    trace: Trace = []
    for i in range(fuel):
        res = step(c)
        rule = res.rule_id if isinstance(res, Stepped) else None
        trace.append(TraceEntry(i, c, rule))
        for h in hooks or ():
            h(i, c, rule)
        if isinstance(res, Final):
            return res, trace
        if isinstance(res, Stuck):
            return res, trace
        c = res.command
    trace.append(TraceEntry(len(trace), c, None))
    return FuelExhausted(c), trace


### Presentation


def describe_frame(f: Frame) -> str:
    from .surface import pretty_print
    if isinstance(f, ArgFrame):
        return f"{pretty_print(f.value)}^{f.ann}"
    if isinstance(f, ProjFrame):
        return f"pi{f.index}^{f.ann}"
    return f"({f.binder}+.{pretty_print(f.body)})^{f.ann}"


def describe(c: Command) -> str:
    from .surface import pretty_print
    stack = " . ".join(describe_frame(f) for f in c.stack) or "*"
    return (f"<{pretty_print(c.expr)} | {stack} |"
            f" {list(c.freelist)}>^{c.ann}")


def trace_to_json(trace: Trace) -> list[dict]:
    from .surface import pretty_print
    out = []
    for entry in trace:
        c = entry.command
        out.append({
            "step": entry.step,
            "polarity": str(c.ann),
            "expr": pretty_print(c.expr),
            "stack": [describe_frame(f) for f in c.stack],
            "freelist": list(c.freelist),
            "rule": entry.rule,
        })
    return out


def write_trace(trace: Trace, path: str):
    with open(path, "w") as fh:
        json.dump(trace_to_json(trace), fh, indent=2)
        fh.write("\n")
