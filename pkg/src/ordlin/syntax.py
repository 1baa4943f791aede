"""Type and term trees shared by every other module.

Types are split into positive data types and negative computation types;
eliminators and let bindings carry an optional polarity annotation that the
checker fills in.  Terms are immutable; all operations here are pure.
"""

from __future__ import annotations

import dataclasses
import itertools
from enum import Enum
from typing import Iterator, Optional


class Polarity(Enum):
    POS = "+"
    NEG = "-"

    def __str__(self) -> str:
        return self.value


### Types


@dataclasses.dataclass(frozen=True)
class Type:
    ...


@dataclasses.dataclass(frozen=True)
class Res(Type):
    """The atomic resource type."""


@dataclasses.dataclass(frozen=True)
class Unit(Type):
    ...


@dataclasses.dataclass(frozen=True)
class Tensor(Type):
    left: Type
    right: Type


@dataclasses.dataclass(frozen=True)
class Sum(Type):
    left: Type
    right: Type


@dataclasses.dataclass(frozen=True)
class LArrow(Type):
    """Function type whose argument binds the leftmost context variable."""

    domain: Type
    codomain: Type


@dataclasses.dataclass(frozen=True)
class With(Type):
    """Lazy pair type."""

    left: Type
    right: Type


RES = Res()
UNIT = Unit()


def polarity(t: Type) -> Polarity:
    if isinstance(t, (Res, Unit, Tensor, Sum)):
        return Polarity.POS
    if isinstance(t, (LArrow, With)):
        return Polarity.NEG
    raise TypeError(f"not a type: {t!r}")


def is_central(t: Type) -> bool:
    """Purely positive types without the resource atom."""
    if isinstance(t, Unit):
        return True
    if isinstance(t, (Tensor, Sum)):
        return is_central(t.left) and is_central(t.right)
    return False


### Terms

# `ty` is filled by the checker and carried along by the machine; it never
# takes part in equality.  `ann` is the inferred polarity of eliminators and
# let bindings; parsed terms leave it None.


@dataclasses.dataclass(frozen=True)
class Expr:
    ...


@dataclasses.dataclass(frozen=True)
class Var(Expr):
    name: str
    ty: Optional[Type] = dataclasses.field(default=None, compare=False, repr=False)


@dataclasses.dataclass(frozen=True)
class ResLit(Expr):
    """Runtime resource literal; never appears in source programs."""

    index: int
    ty: Optional[Type] = dataclasses.field(default=None, compare=False, repr=False)


@dataclasses.dataclass(frozen=True)
class UnitVal(Expr):
    ty: Optional[Type] = dataclasses.field(default=None, compare=False, repr=False)


@dataclasses.dataclass(frozen=True)
class Pair(Expr):
    fst: Expr
    snd: Expr
    ty: Optional[Type] = dataclasses.field(default=None, compare=False, repr=False)


@dataclasses.dataclass(frozen=True)
class Inj(Expr):
    tag: int  # 1 or 2
    value: Expr
    ty: Optional[Type] = dataclasses.field(default=None, compare=False, repr=False)


@dataclasses.dataclass(frozen=True)
class Lam(Expr):
    binder: str
    body: Expr
    binder_ty: Optional[Type] = None  # optional surface ascription
    ty: Optional[Type] = dataclasses.field(default=None, compare=False, repr=False)


@dataclasses.dataclass(frozen=True)
class LazyPair(Expr):
    fst: Expr
    snd: Expr
    ty: Optional[Type] = dataclasses.field(default=None, compare=False, repr=False)


@dataclasses.dataclass(frozen=True)
class NewConst(Expr):
    ty: Optional[Type] = dataclasses.field(default=None, compare=False, repr=False)


@dataclasses.dataclass(frozen=True)
class DeleteConst(Expr):
    ty: Optional[Type] = dataclasses.field(default=None, compare=False, repr=False)


@dataclasses.dataclass(frozen=True)
class Let(Expr):
    binder: str
    bound: Expr
    body: Expr
    bound_ann: Optional[Polarity] = None  # polarity of the bound term's type
    ann: Optional[Polarity] = None  # polarity of the whole expression
    ty: Optional[Type] = dataclasses.field(default=None, compare=False, repr=False)


@dataclasses.dataclass(frozen=True)
class MatchPair(Expr):
    scrut: Expr
    binder1: str
    binder2: str
    body: Expr
    ann: Optional[Polarity] = None
    ty: Optional[Type] = dataclasses.field(default=None, compare=False, repr=False)


@dataclasses.dataclass(frozen=True)
class MatchUnit(Expr):
    scrut: Expr
    body: Expr
    ann: Optional[Polarity] = None
    ty: Optional[Type] = dataclasses.field(default=None, compare=False, repr=False)


@dataclasses.dataclass(frozen=True)
class MatchSum(Expr):
    scrut: Expr
    binder1: str
    body1: Expr
    binder2: str
    body2: Expr
    ann: Optional[Polarity] = None
    ty: Optional[Type] = dataclasses.field(default=None, compare=False, repr=False)


@dataclasses.dataclass(frozen=True)
class App(Expr):
    fn: Expr
    arg: Expr
    ann: Optional[Polarity] = None
    ty: Optional[Type] = dataclasses.field(default=None, compare=False, repr=False)


@dataclasses.dataclass(frozen=True)
class Proj(Expr):
    tag: int  # 1 or 2
    value: Expr
    ann: Optional[Polarity] = None
    ty: Optional[Type] = dataclasses.field(default=None, compare=False, repr=False)


@dataclasses.dataclass(frozen=True)
class Ascribe(Expr):
    """Type ascription; consumed by the checker, absent from checked output."""

    expr: Expr
    ty_ann: Type
    ty: Optional[Type] = dataclasses.field(default=None, compare=False, repr=False)


### Affine-only constructors (rejected by the core checker)


@dataclasses.dataclass(frozen=True)
class DropConst(Expr):
    ty: Optional[Type] = dataclasses.field(default=None, compare=False, repr=False)


@dataclasses.dataclass(frozen=True)
class RaiseConst(Expr):
    ty: Optional[Type] = dataclasses.field(default=None, compare=False, repr=False)


@dataclasses.dataclass(frozen=True)
class MoveIn(Expr):
    """Explicit exchange of the adjacent context variables y, x into x, y."""

    var1: str  # x
    var2: str  # y
    body: Expr
    ty: Optional[Type] = dataclasses.field(default=None, compare=False, repr=False)


@dataclasses.dataclass(frozen=True)
class TryIn(Expr):
    binder: str
    bound: Expr
    body: Expr
    exc_binder: str
    handler: Expr
    ty: Optional[Type] = dataclasses.field(default=None, compare=False, repr=False)


@dataclasses.dataclass(frozen=True)
class Coerce(Expr):
    """Marks a positive value used in expression position."""

    value: Expr
    ty: Optional[Type] = dataclasses.field(default=None, compare=False, repr=False)


### Surface-only sugar


@dataclasses.dataclass(frozen=True)
class Seq(Expr):
    """t ; u — expanded by desugar."""

    first: Expr
    second: Expr
    ty: Optional[Type] = dataclasses.field(default=None, compare=False, repr=False)


AFFINE_NODES = (DropConst, RaiseConst, MoveIn, TryIn, Coerce)

_CONSTS = (NewConst, DeleteConst, DropConst, RaiseConst)


def is_value(e: Expr) -> bool:
    """The value sub-grammar, read off annotated terms.

    Eliminators and let bindings are values exactly when their inferred
    polarity is negative; unannotated ones are conservatively non-values.
    """
    if isinstance(e, (Var, ResLit, UnitVal, Lam, LazyPair) + _CONSTS):
        return True
    if isinstance(e, Pair):
        return is_value(e.fst) and is_value(e.snd)
    if isinstance(e, Inj):
        return is_value(e.value)
    if isinstance(e, (Let, MatchPair, MatchUnit, MatchSum, App, Proj)):
        return e.ann is Polarity.NEG
    if isinstance(e, Ascribe):
        return is_value(e.expr)
    return False


def is_syntactic_value(e: Expr) -> bool:
    """Value-ness decidable before type checking; used by desugaring."""
    if isinstance(e, (Var, ResLit, UnitVal, Lam, LazyPair) + _CONSTS):
        return True
    if isinstance(e, Pair):
        return is_syntactic_value(e.fst) and is_syntactic_value(e.snd)
    if isinstance(e, Inj):
        return is_syntactic_value(e.value)
    if isinstance(e, Ascribe):
        return is_syntactic_value(e.expr)
    return False


def children(e: Expr) -> list[Expr]:
    out = []
    for f in dataclasses.fields(e):
        v = getattr(e, f.name)
        if isinstance(v, Expr):
            out.append(v)
    return out


def size(e: Expr) -> int:
    return 1 + sum(size(c) for c in children(e))


def subexpressions(e: Expr) -> Iterator[Expr]:
    yield e
    for c in children(e):
        yield from subexpressions(c)


def contains_affine(e: Expr) -> bool:
    return any(isinstance(s, AFFINE_NODES) for s in subexpressions(e))


def contains_reslit(e: Expr) -> bool:
    return any(isinstance(s, ResLit) for s in subexpressions(e))


### Free variables

def free_vars(e: Expr) -> set[str]:
    """All free variables, over every subterm (including both components of
    shared-context forms, unlike free_var_sequence)."""
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Lam):
        return free_vars(e.body) - {e.binder}
    if isinstance(e, Let):
        return (free_vars(e.body) - {e.binder}) | free_vars(e.bound)
    if isinstance(e, MatchPair):
        return ((free_vars(e.body) - {e.binder1, e.binder2})
                | free_vars(e.scrut))
    if isinstance(e, MatchSum):
        return ((free_vars(e.body1) - {e.binder1})
                | (free_vars(e.body2) - {e.binder2})
                | free_vars(e.scrut))
    if isinstance(e, TryIn):
        return ((free_vars(e.body) - {e.binder})
                | (free_vars(e.handler) - {e.exc_binder})
                | free_vars(e.bound))
    out: set[str] = set()
    for c in children(e):
        out |= free_vars(c)
    return out


def free_var_sequence(e: Expr) -> list[str]:
    """Free variables in the order the ordered typing rules consume them.

    For most nodes this is the syntactic left-to-right order; applications
    list the argument's variables first and let bindings list the body's
    variables first, mirroring the shape of the corresponding typing rules.
    Duplicate occurrences are reported, not collapsed.
    """
    if isinstance(e, Var):
        return [e.name]
    if isinstance(e, (ResLit, UnitVal) + _CONSTS):
        return []
    if isinstance(e, Pair):
        return free_var_sequence(e.fst) + free_var_sequence(e.snd)
    if isinstance(e, LazyPair):
        # both components share the context, like sum branches below
        return free_var_sequence(e.fst)
    if isinstance(e, Inj):
        return free_var_sequence(e.value)
    if isinstance(e, Lam):
        return _without(free_var_sequence(e.body), [e.binder])
    if isinstance(e, Let):
        body = _without(free_var_sequence(e.body), [e.binder])
        return body + free_var_sequence(e.bound)
    if isinstance(e, MatchPair):
        return _around(free_var_sequence(e.body), [e.binder1, e.binder2],
                       free_var_sequence(e.scrut))
    if isinstance(e, MatchUnit):
        return free_var_sequence(e.body) + free_var_sequence(e.scrut)
    if isinstance(e, MatchSum):
        return _around(free_var_sequence(e.body1), [e.binder1],
                       free_var_sequence(e.scrut))
    if isinstance(e, App):
        return free_var_sequence(e.arg) + free_var_sequence(e.fn)
    if isinstance(e, Proj):
        return free_var_sequence(e.value)
    if isinstance(e, Ascribe):
        return free_var_sequence(e.expr)
    if isinstance(e, MoveIn):
        seq = free_var_sequence(e.body)
        # the conclusion context reads ..., y, x, ... where the body reads
        # ..., x, y, ...
        try:
            i = seq.index(e.var1)
            if i + 1 < len(seq) and seq[i + 1] == e.var2:
                seq = seq[:i] + [e.var2, e.var1] + seq[i + 2:]
        except ValueError:
            pass
        return seq
    if isinstance(e, TryIn):
        body = _without(free_var_sequence(e.body), [e.binder])
        return body + free_var_sequence(e.bound)
    if isinstance(e, Coerce):
        return free_var_sequence(e.value)
    if isinstance(e, Seq):
        return free_var_sequence(e.second) + free_var_sequence(e.first)
    raise TypeError(f"not an expression: {e!r}")


def _without(seq: list[str], names: list[str]) -> list[str]:
    return [n for n in seq if n not in names]


def _around(body_seq: list[str], binders: list[str], scrut_seq: list[str]) -> list[str]:
    """Splice the scrutinee's variables where the binders sat in the body."""
    idx = len(body_seq)
    for i, n in enumerate(body_seq):
        if n in binders:
            idx = i
            break
    rest = [n for n in body_seq if n not in binders]
    removed_before = sum(1 for n in body_seq[:idx] if n in binders)
    idx -= removed_before
    return rest[:idx] + scrut_seq + rest[idx:]


### Substitution

_gensym_counter = itertools.count()


def gensym(base: str = "x") -> str:
    return f"_{base}{next(_gensym_counter)}"


def _binders(e: Expr) -> list[str]:
    if isinstance(e, Lam):
        return [e.binder]
    if isinstance(e, Let):
        return [e.binder]
    if isinstance(e, MatchPair):
        return [e.binder1, e.binder2]
    if isinstance(e, MatchSum):
        return [e.binder1, e.binder2]
    if isinstance(e, TryIn):
        return [e.binder, e.exc_binder]
    return []


def rename_binder(e: Expr, old: str, new: str) -> Expr:
    """Rename one binder of `e` (and its bound occurrences)."""
    if isinstance(e, Lam) and e.binder == old:
        return dataclasses.replace(e, binder=new, body=substitute(e.body, old, Var(new)))
    if isinstance(e, Let) and e.binder == old:
        return dataclasses.replace(e, binder=new, body=substitute(e.body, old, Var(new)))
    if isinstance(e, MatchPair):
        if e.binder1 == old:
            return dataclasses.replace(e, binder1=new, body=substitute(e.body, old, Var(new)))
        if e.binder2 == old:
            return dataclasses.replace(e, binder2=new, body=substitute(e.body, old, Var(new)))
    if isinstance(e, MatchSum):
        if e.binder1 == old:
            return dataclasses.replace(e, binder1=new, body1=substitute(e.body1, old, Var(new)))
        if e.binder2 == old:
            return dataclasses.replace(e, binder2=new, body2=substitute(e.body2, old, Var(new)))
    if isinstance(e, TryIn):
        if e.binder == old:
            return dataclasses.replace(e, binder=new, body=substitute(e.body, old, Var(new)))
        if e.exc_binder == old:
            return dataclasses.replace(e, exc_binder=new, handler=substitute(e.handler, old, Var(new)))
    raise ValueError(f"{old} is not a binder of {e!r}")


def substitute(e: Expr, x: str, v: Expr) -> Expr:
    """Replace the free occurrences of x in e by v, avoiding capture."""
    if isinstance(e, Var):
        if e.name == x:
            # keep the type recorded at the occurrence when the replacement
            # carries none
            if v.ty is None and e.ty is not None:
                return dataclasses.replace(v, ty=e.ty)
            return v
        return e
    if x not in free_vars(e):
        return e
    fv_v = free_vars(v)
    for b in _binders(e):
        if b != x and b in fv_v:
            e = rename_binder(e, b, gensym(b.lstrip("_").rstrip("0123456789") or "x"))

    def go(sub: Expr, shadowed: list[str]) -> Expr:
        if x in shadowed:
            return sub
        return substitute(sub, x, v)

    if isinstance(e, Pair):
        return dataclasses.replace(e, fst=go(e.fst, []), snd=go(e.snd, []))
    if isinstance(e, LazyPair):
        return dataclasses.replace(e, fst=go(e.fst, []), snd=go(e.snd, []))
    if isinstance(e, Inj):
        return dataclasses.replace(e, value=go(e.value, []))
    if isinstance(e, Lam):
        return dataclasses.replace(e, body=go(e.body, [e.binder]))
    if isinstance(e, Let):
        return dataclasses.replace(e, bound=go(e.bound, []), body=go(e.body, [e.binder]))
    if isinstance(e, MatchPair):
        return dataclasses.replace(e, scrut=go(e.scrut, []),
                                   body=go(e.body, [e.binder1, e.binder2]))
    if isinstance(e, MatchUnit):
        return dataclasses.replace(e, scrut=go(e.scrut, []), body=go(e.body, []))
    if isinstance(e, MatchSum):
        return dataclasses.replace(e, scrut=go(e.scrut, []),
                                   body1=go(e.body1, [e.binder1]),
                                   body2=go(e.body2, [e.binder2]))
    if isinstance(e, App):
        return dataclasses.replace(e, fn=go(e.fn, []), arg=go(e.arg, []))
    if isinstance(e, Proj):
        return dataclasses.replace(e, value=go(e.value, []))
    if isinstance(e, Ascribe):
        return dataclasses.replace(e, expr=go(e.expr, []))
    if isinstance(e, MoveIn):
        return dataclasses.replace(e, body=go(e.body, []))
    if isinstance(e, TryIn):
        return dataclasses.replace(e, bound=go(e.bound, []),
                                   body=go(e.body, [e.binder]),
                                   handler=go(e.handler, [e.exc_binder]))
    if isinstance(e, Coerce):
        return dataclasses.replace(e, value=go(e.value, []))
    if isinstance(e, Seq):
        return dataclasses.replace(e, first=go(e.first, []), second=go(e.second, []))
    return e


### Alpha equivalence


def alpha_eq(a: Expr, b: Expr, env: Optional[dict[str, str]] = None) -> bool:
    """Structural equality up to bound-variable names.

    Polarity annotations and recorded types are ignored: they are re-inferable
    from the typing derivation.
    """
    if env is None:
        env = {}
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        return env.get(a.name, a.name) == b.name
    if isinstance(a, ResLit):
        return a.index == b.index
    if isinstance(a, (UnitVal,) + _CONSTS):
        return True
    if isinstance(a, (Pair, LazyPair)):
        return alpha_eq(a.fst, b.fst, env) and alpha_eq(a.snd, b.snd, env)
    if isinstance(a, Inj):
        return a.tag == b.tag and alpha_eq(a.value, b.value, env)
    if isinstance(a, Lam):
        return (a.binder_ty == b.binder_ty
                and alpha_eq(a.body, b.body, env | {a.binder: b.binder}))
    if isinstance(a, Let):
        return (alpha_eq(a.bound, b.bound, env)
                and alpha_eq(a.body, b.body, env | {a.binder: b.binder}))
    if isinstance(a, MatchPair):
        return (alpha_eq(a.scrut, b.scrut, env)
                and alpha_eq(a.body, b.body,
                             env | {a.binder1: b.binder1, a.binder2: b.binder2}))
    if isinstance(a, MatchUnit):
        return alpha_eq(a.scrut, b.scrut, env) and alpha_eq(a.body, b.body, env)
    if isinstance(a, MatchSum):
        return (alpha_eq(a.scrut, b.scrut, env)
                and alpha_eq(a.body1, b.body1, env | {a.binder1: b.binder1})
                and alpha_eq(a.body2, b.body2, env | {a.binder2: b.binder2}))
    if isinstance(a, App):
        return alpha_eq(a.fn, b.fn, env) and alpha_eq(a.arg, b.arg, env)
    if isinstance(a, Proj):
        return a.tag == b.tag and alpha_eq(a.value, b.value, env)
    if isinstance(a, Ascribe):
        return a.ty_ann == b.ty_ann and alpha_eq(a.expr, b.expr, env)
    if isinstance(a, MoveIn):
        return (env.get(a.var1, a.var1) == b.var1
                and env.get(a.var2, a.var2) == b.var2
                and alpha_eq(a.body, b.body, env))
    if isinstance(a, TryIn):
        return (alpha_eq(a.bound, b.bound, env)
                and alpha_eq(a.body, b.body, env | {a.binder: b.binder})
                and alpha_eq(a.handler, b.handler, env | {a.exc_binder: b.exc_binder}))
    if isinstance(a, Coerce):
        return alpha_eq(a.value, b.value, env)
    if isinstance(a, Seq):
        return alpha_eq(a.first, b.first, env) and alpha_eq(a.second, b.second, env)
    raise TypeError(f"not an expression: {a!r}")


### Desugaring


def desugar(e: Expr) -> Expr:
    """Expand sequencing and lift non-value subterms out of value positions.

    Each lift introduces a fresh positive let; the output contains no Seq
    nodes and every value position holds a syntactic value.  Idempotent on
    already-desugared terms.
    """
    e = _desugar_children(e)
    if isinstance(e, Seq):
        x = gensym("s")
        return Let(x, e.first, MatchUnit(Var(x), e.second))
    if isinstance(e, Pair):
        return _lift([e.fst, e.snd], lambda vs: Pair(vs[0], vs[1]))
    if isinstance(e, Inj):
        return _lift([e.value], lambda vs: Inj(e.tag, vs[0]))
    if isinstance(e, App):
        return _lift([e.fn, e.arg],
                     lambda vs: App(vs[0], vs[1], ann=e.ann), order=[0, 1])
    if isinstance(e, Proj):
        return _lift([e.value], lambda vs: Proj(e.tag, vs[0], ann=e.ann))
    if isinstance(e, MatchPair):
        return _lift([e.scrut],
                     lambda vs: dataclasses.replace(e, scrut=vs[0]))
    if isinstance(e, MatchUnit):
        return _lift([e.scrut],
                     lambda vs: dataclasses.replace(e, scrut=vs[0]))
    if isinstance(e, MatchSum):
        return _lift([e.scrut],
                     lambda vs: dataclasses.replace(e, scrut=vs[0]))
    if isinstance(e, Coerce):
        return _lift([e.value], lambda vs: dataclasses.replace(e, value=vs[0]))
    return e


def _desugar_children(e: Expr) -> Expr:
    updates = {}
    for f in dataclasses.fields(e):
        v = getattr(e, f.name)
        if isinstance(v, Expr):
            d = desugar(v)
            if d is not v:
                updates[f.name] = d
    return dataclasses.replace(e, **updates) if updates else e


def _lift(parts, rebuild, order=None):
    """let-bind the non-value parts (in evaluation order), keep values put."""
    if order is None:
        order = list(range(len(parts)))
    vals = list(parts)
    bindings = []
    for i in order:
        if not is_syntactic_value(vals[i]):
            x = gensym("v")
            bindings.append((x, vals[i]))
            vals[i] = Var(x)
    out = rebuild(vals)
    for x, t in reversed(bindings):
        out = Let(x, t, out)
    return out


### Alpha-freshening


def alpha_freshen(e: Expr) -> Expr:
    """Rename binders so that every binder name in the tree is unique."""
    seen: set[str] = set()

    def fresh(n: str) -> str:
        if n not in seen:
            seen.add(n)
            return n
        i = 1
        while f"{n}_{i}" in seen:
            i += 1
        seen.add(f"{n}_{i}")
        return f"{n}_{i}"

    def go(e: Expr, env: dict[str, str]) -> Expr:
        if isinstance(e, Var):
            return dataclasses.replace(e, name=env.get(e.name, e.name))
        if isinstance(e, Lam):
            b = fresh(e.binder)
            return dataclasses.replace(e, binder=b, body=go(e.body, env | {e.binder: b}))
        if isinstance(e, Let):
            b = fresh(e.binder)
            return dataclasses.replace(e, bound=go(e.bound, env), binder=b,
                                       body=go(e.body, env | {e.binder: b}))
        if isinstance(e, MatchPair):
            b1, b2 = fresh(e.binder1), fresh(e.binder2)
            return dataclasses.replace(
                e, scrut=go(e.scrut, env), binder1=b1, binder2=b2,
                body=go(e.body, env | {e.binder1: b1, e.binder2: b2}))
        if isinstance(e, MatchSum):
            b1, b2 = fresh(e.binder1), fresh(e.binder2)
            return dataclasses.replace(
                e, scrut=go(e.scrut, env),
                binder1=b1, body1=go(e.body1, env | {e.binder1: b1}),
                binder2=b2, body2=go(e.body2, env | {e.binder2: b2}))
        if isinstance(e, TryIn):
            b, eb = fresh(e.binder), fresh(e.exc_binder)
            return dataclasses.replace(
                e, bound=go(e.bound, env), binder=b,
                body=go(e.body, env | {e.binder: b}),
                exc_binder=eb, handler=go(e.handler, env | {e.exc_binder: eb}))
        if isinstance(e, MoveIn):
            return dataclasses.replace(
                e, var1=env.get(e.var1, e.var1), var2=env.get(e.var2, e.var2),
                body=go(e.body, env))
        updates = {}
        for f in dataclasses.fields(e):
            v = getattr(e, f.name)
            if isinstance(v, Expr):
                updates[f.name] = go(v, env)
        return dataclasses.replace(e, **updates) if updates else e

    return go(e, {})
