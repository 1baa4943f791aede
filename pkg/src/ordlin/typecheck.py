"""Bidirectional type checker for the core calculus.

Two modes: Ordered (no exchange; context order and contiguous splits are
enforced) and Linear (context treated modulo permutation).  Context splits are
driven by free variables, which exact linearity makes unique whenever a
derivation exists; the Ordered mode additionally checks the block structure
each rule demands.  `declarative_check` is an independent brute-force search
over derivations used as an oracle in the tests.
"""

from __future__ import annotations

import dataclasses
from collections import Counter
from enum import Enum
from typing import Optional

from . import syntax as S
from .syntax import Polarity

Context = tuple[tuple[str, S.Type], ...]

NEW_TYPE = S.LArrow(S.UNIT, S.Sum(S.RES, S.UNIT))
DELETE_TYPE = S.LArrow(S.RES, S.UNIT)


class Mode(Enum):
    ORDERED = "ordered"
    LINEAR = "linear"


class CheckError(Exception):
    """Typing failure; `code` names the violated condition."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


def _err(code: str, message: str) -> CheckError:
    return CheckError(code, message)


def context(*pairs) -> Context:
    return tuple(pairs)


### Entry points


def check_core(ctx: Context, e: S.Expr, ty: S.Type, mode: Mode,
               runtime: bool = False) -> S.Expr:
    """Check e against ty, returning the polarity-annotated, type-decorated
    (and ascription-free) term.  Raises CheckError when no derivation exists.

    With runtime=True, resource literals are admitted at the atomic resource
    type (the judgment used for machine states).
    """
    if S.contains_affine(e):
        raise _err("AffineConstructor",
                   "affine-only construct in a core-dialect term")
    if not runtime and S.contains_reslit(e):
        raise _err("ResourceLiteral",
                   "resource literals cannot appear in source programs")
    ck = _Checker(mode, runtime)
    ck.verify_consumption(ctx, e)
    return ck.check(ctx, e, ty)


def synthesize_value(ctx: Context, v: S.Expr, mode: Mode,
                     runtime: bool = False) -> tuple[S.Type, S.Expr]:
    ck = _Checker(mode, runtime)
    ck.verify_consumption(ctx, v)
    ty, typed = ck.synth(ctx, v)
    return ty, typed


### The algorithmic checker


class _Checker:
    def __init__(self, mode: Mode, runtime: bool):
        self.mode = mode
        self.runtime = runtime

    ## context plumbing

    def verify_consumption(self, ctx: Context, e: S.Expr):
        fv = Counter(S.free_var_sequence(e))
        have = Counter(n for n, _ in ctx)
        for n, k in fv.items():
            if k > 1:
                raise _err("DuplicateUse", f"variable {n} used {k} times")
            if n not in have:
                raise _err("UnboundVariable", f"variable {n} is not in scope")
        for n in have:
            if n not in fv:
                raise _err("UnusedVariable", f"variable {n} is never used")

    def split_suffix(self, ctx: Context, right_fv: set[str],
                     what: str) -> tuple[Context, Context]:
        """Split ctx = Γ,Δ with Δ the entries used by the right-hand part.

        In Ordered mode Δ must be a contiguous suffix of ctx.
        """
        left = tuple(p for p in ctx if p[0] not in right_fv)
        right = tuple(p for p in ctx if p[0] in right_fv)
        if self.mode is Mode.ORDERED and ctx != left + right:
            raise _err("OrderViolation",
                       f"the {what} must use a suffix of the context")
        return left, right

    def split_middle(self, ctx: Context, mid_fv: set[str],
                     what: str) -> tuple[Context, list[tuple[Context, Context]]]:
        """Split ctx = Γ,Δ,Γ′ with Δ the entries used by a scrutinee.

        Returns Δ plus the candidate (Γ, Γ′) placements; when the scrutinee is
        closed the placement of the eliminated block is not determined by the
        conclusion, so every split point is a candidate (Ordered mode only).
        """
        delta = tuple(p for p in ctx if p[0] in mid_fv)
        rest = tuple(p for p in ctx if p[0] not in mid_fv)
        if self.mode is Mode.LINEAR:
            return delta, [(rest, ())]
        if delta:
            positions = [i for i, p in enumerate(ctx) if p[0] in mid_fv]
            lo, hi = positions[0], positions[-1]
            if hi - lo + 1 != len(positions):
                raise _err("OrderViolation",
                           f"the {what} must use a contiguous block of the context")
            return delta, [(ctx[:lo], ctx[hi + 1:])]
        return delta, [((rest[:i]), (rest[i:])) for i in range(len(rest) + 1)]

    ## checking

    def check(self, ctx: Context, e: S.Expr, ty: S.Type) -> S.Expr:
        self.verify_consumption(ctx, e)
        if isinstance(e, S.Var):
            if len(ctx) != 1 or ctx[0][0] != e.name:
                raise _err("UnboundVariable", f"variable {e.name}")
            if ctx[0][1] != ty:
                raise _err("TypeMismatch",
                           f"variable {e.name} has type {ctx[0][1]}, wanted {ty}")
            return dataclasses.replace(e, ty=ty)
        if isinstance(e, S.ResLit):
            if not self.runtime:
                raise _err("ResourceLiteral", "resource literal in source term")
            if ty != S.RES:
                raise _err("TypeMismatch", f"resource literal at {ty}")
            return dataclasses.replace(e, ty=ty)
        if isinstance(e, S.UnitVal):
            if ty != S.UNIT:
                raise _err("TypeMismatch", f"() at {ty}")
            return dataclasses.replace(e, ty=ty)
        if isinstance(e, S.NewConst):
            if ty != NEW_TYPE:
                raise _err("TypeMismatch", f"new has type {NEW_TYPE}, wanted {ty}")
            return dataclasses.replace(e, ty=ty)
        if isinstance(e, S.DeleteConst):
            if ty != DELETE_TYPE:
                raise _err("TypeMismatch",
                           f"delete has type {DELETE_TYPE}, wanted {ty}")
            return dataclasses.replace(e, ty=ty)
        if isinstance(e, S.Pair):
            if not isinstance(ty, S.Tensor):
                raise _err("TypeMismatch", f"pair at non-tensor type {ty}")
            left, right = self.split_suffix(ctx, S.free_vars(e.snd),
                                            "second pair component")
            fst = self.check_value(left, e.fst, ty.left)
            snd = self.check_value(right, e.snd, ty.right)
            return dataclasses.replace(e, fst=fst, snd=snd, ty=ty)
        if isinstance(e, S.Inj):
            if not isinstance(ty, S.Sum):
                raise _err("TypeMismatch", f"injection at non-sum type {ty}")
            inner = ty.left if e.tag == 1 else ty.right
            return dataclasses.replace(
                e, value=self.check_value(ctx, e.value, inner), ty=ty)
        if isinstance(e, S.Lam):
            if not isinstance(ty, S.LArrow):
                raise _err("TypeMismatch", f"function at non-arrow type {ty}")
            if e.binder_ty is not None and e.binder_ty != ty.domain:
                raise _err("TypeMismatch",
                           f"binder ascription {e.binder_ty} vs domain {ty.domain}")
            body = self.check(((e.binder, ty.domain),) + ctx, e.body, ty.codomain)
            return dataclasses.replace(e, body=body, binder_ty=None, ty=ty)
        if isinstance(e, S.LazyPair):
            if not isinstance(ty, S.With):
                raise _err("TypeMismatch", f"lazy pair at non-with type {ty}")
            fst = self.check(ctx, e.fst, ty.left)
            snd = self.check(ctx, e.snd, ty.right)
            return dataclasses.replace(e, fst=fst, snd=snd, ty=ty)
        if isinstance(e, S.Let):
            left, right = self.split_suffix(ctx, S.free_vars(e.bound),
                                            "bound term of a let")
            bound_ty, bound = self.synth(right, e.bound)
            body = self.check(left + ((e.binder, bound_ty),), e.body, ty)
            if S.polarity(bound_ty) is Polarity.NEG and not S.is_value(bound):
                raise _err("PolarityMismatch",
                           "negative let binding requires a value")
            return dataclasses.replace(
                e, bound=bound, body=body,
                bound_ann=S.polarity(bound_ty), ann=S.polarity(ty), ty=ty)
        if isinstance(e, S.MatchPair):
            scrut_ty, scrut, candidates = self.elim_scrutinee(ctx, e.scrut,
                                                              "pair match")
            if not isinstance(scrut_ty, S.Tensor):
                raise _err("TypeMismatch", f"pair match on {scrut_ty}")
            binders = ((e.binder1, scrut_ty.left), (e.binder2, scrut_ty.right))
            body = self.try_candidates(
                candidates, lambda g, g2: self.check(g + binders + g2, e.body, ty))
            return dataclasses.replace(e, scrut=scrut, body=body,
                                       ann=S.polarity(ty), ty=ty)
        if isinstance(e, S.MatchUnit):
            scrut_ty, scrut, candidates = self.elim_scrutinee(ctx, e.scrut,
                                                              "unit match")
            if scrut_ty != S.UNIT:
                raise _err("TypeMismatch", f"unit match on {scrut_ty}")
            g, g2 = candidates[0]
            body = self.check(g + g2, e.body, ty)
            return dataclasses.replace(e, scrut=scrut, body=body,
                                       ann=S.polarity(ty), ty=ty)
        if isinstance(e, S.MatchSum):
            scrut_ty, scrut, candidates = self.elim_scrutinee(ctx, e.scrut,
                                                              "sum match")
            if not isinstance(scrut_ty, S.Sum):
                raise _err("TypeMismatch", f"sum match on {scrut_ty}")

            def both(g: Context, g2: Context):
                b1 = self.check(g + ((e.binder1, scrut_ty.left),) + g2, e.body1, ty)
                b2 = self.check(g + ((e.binder2, scrut_ty.right),) + g2, e.body2, ty)
                return b1, b2

            body1, body2 = self.try_candidates(candidates, both)
            return dataclasses.replace(e, scrut=scrut, body1=body1, body2=body2,
                                       ann=S.polarity(ty), ty=ty)
        if isinstance(e, S.App):
            left, right = self.split_suffix(ctx, S.free_vars(e.fn), "function")
            fn_ty, fn = self.synth(right, e.fn)
            if not isinstance(fn_ty, S.LArrow):
                raise _err("TypeMismatch", f"application of a {fn_ty}")
            if fn_ty.codomain != ty:
                raise _err("TypeMismatch",
                           f"application returns {fn_ty.codomain}, wanted {ty}")
            if not S.is_value(fn):
                raise _err("PolarityMismatch", "function position requires a value")
            arg = self.check_value(left, e.arg, fn_ty.domain)
            return dataclasses.replace(e, fn=fn, arg=arg,
                                       ann=S.polarity(ty), ty=ty)
        if isinstance(e, S.Proj):
            v_ty, v = self.synth(ctx, e.value)
            if not isinstance(v_ty, S.With):
                raise _err("TypeMismatch", f"projection of a {v_ty}")
            if not S.is_value(v):
                raise _err("PolarityMismatch", "projection requires a value")
            comp = v_ty.left if e.tag == 1 else v_ty.right
            if comp != ty:
                raise _err("TypeMismatch", f"projection gives {comp}, wanted {ty}")
            return dataclasses.replace(e, value=v, ann=S.polarity(ty), ty=ty)
        if isinstance(e, S.Ascribe):
            if e.ty_ann != ty:
                raise _err("TypeMismatch",
                           f"ascription {e.ty_ann} against expected {ty}")
            return self.check(ctx, e.expr, ty)
        raise _err("TypeMismatch", f"cannot check {type(e).__name__}")

    def check_value(self, ctx: Context, v: S.Expr, ty: S.Type) -> S.Expr:
        typed = self.check(ctx, v, ty)
        if not S.is_value(typed):
            raise _err("PolarityMismatch",
                       f"{type(v).__name__} is not a value here")
        return typed

    def elim_scrutinee(self, ctx: Context, scrut: S.Expr, what: str):
        delta, candidates = self.split_middle(ctx, S.free_vars(scrut), what)
        scrut_ty, typed = self.synth(delta, scrut)
        if not S.is_value(typed):
            raise _err("PolarityMismatch", "scrutinee must be a value")
        return scrut_ty, typed, candidates

    def try_candidates(self, candidates, f):
        first: Optional[CheckError] = None
        for g, g2 in candidates:
            try:
                return f(g, g2)
            except CheckError as exc:
                if first is None:
                    first = exc
        assert first is not None
        raise first

    ## synthesis

    def synth(self, ctx: Context, e: S.Expr) -> tuple[S.Type, S.Expr]:
        try:
            return self._synth(ctx, e)
        except CheckError as exc:
            # Runtime terms have lost their source ascriptions, but carry
            # recorded types; use those as witnesses and re-derive by checking.
            if (exc.code == "AnnotationRequired" and self.runtime
                    and e.ty is not None):
                return e.ty, self.check(ctx, e, e.ty)
            raise

    def _synth(self, ctx: Context, e: S.Expr) -> tuple[S.Type, S.Expr]:
        self.verify_consumption(ctx, e)
        if isinstance(e, S.Var):
            if len(ctx) != 1 or ctx[0][0] != e.name:
                raise _err("UnboundVariable", f"variable {e.name}")
            return ctx[0][1], dataclasses.replace(e, ty=ctx[0][1])
        if isinstance(e, S.ResLit):
            if not self.runtime:
                raise _err("ResourceLiteral", "resource literal in source term")
            return S.RES, dataclasses.replace(e, ty=S.RES)
        if isinstance(e, S.UnitVal):
            return S.UNIT, dataclasses.replace(e, ty=S.UNIT)
        if isinstance(e, S.NewConst):
            return NEW_TYPE, dataclasses.replace(e, ty=NEW_TYPE)
        if isinstance(e, S.DeleteConst):
            return DELETE_TYPE, dataclasses.replace(e, ty=DELETE_TYPE)
        if isinstance(e, S.Ascribe):
            return e.ty_ann, self.check(ctx, e.expr, e.ty_ann)
        if isinstance(e, S.Pair):
            left, right = self.split_suffix(ctx, S.free_vars(e.snd),
                                            "second pair component")
            lt, fst = self.synth(left, e.fst)
            rt, snd = self.synth(right, e.snd)
            ty = S.Tensor(lt, rt)
            if not (S.is_value(fst) and S.is_value(snd)):
                raise _err("PolarityMismatch", "pair components must be values")
            return ty, dataclasses.replace(e, fst=fst, snd=snd, ty=ty)
        if isinstance(e, S.App):
            left, right = self.split_suffix(ctx, S.free_vars(e.fn), "function")
            fn_ty, fn = self.synth(right, e.fn)
            if not isinstance(fn_ty, S.LArrow):
                raise _err("TypeMismatch", f"application of a {fn_ty}")
            if not S.is_value(fn):
                raise _err("PolarityMismatch", "function position requires a value")
            arg = self.check_value(left, e.arg, fn_ty.domain)
            ty = fn_ty.codomain
            return ty, dataclasses.replace(e, fn=fn, arg=arg,
                                           ann=S.polarity(ty), ty=ty)
        if isinstance(e, S.Proj):
            v_ty, v = self.synth(ctx, e.value)
            if not isinstance(v_ty, S.With):
                raise _err("TypeMismatch", f"projection of a {v_ty}")
            if not S.is_value(v):
                raise _err("PolarityMismatch", "projection requires a value")
            ty = v_ty.left if e.tag == 1 else v_ty.right
            return ty, dataclasses.replace(e, value=v, ann=S.polarity(ty), ty=ty)
        if isinstance(e, S.Lam):
            if e.binder_ty is None:
                raise _err("AnnotationRequired",
                           "cannot infer the domain of an unannotated function")
            body_ty, body = self.synth(((e.binder, e.binder_ty),) + ctx, e.body)
            ty = S.LArrow(e.binder_ty, body_ty)
            return ty, dataclasses.replace(e, body=body, binder_ty=None, ty=ty)
        if isinstance(e, S.LazyPair):
            lt, fst = self.synth(ctx, e.fst)
            rt, snd = self.synth(ctx, e.snd)
            ty = S.With(lt, rt)
            return ty, dataclasses.replace(e, fst=fst, snd=snd, ty=ty)
        if isinstance(e, S.Let):
            left, right = self.split_suffix(ctx, S.free_vars(e.bound),
                                            "bound term of a let")
            bound_ty, bound = self.synth(right, e.bound)
            if S.polarity(bound_ty) is Polarity.NEG and not S.is_value(bound):
                raise _err("PolarityMismatch",
                           "negative let binding requires a value")
            body_ty, body = self.synth(left + ((e.binder, bound_ty),), e.body)
            return body_ty, dataclasses.replace(
                e, bound=bound, body=body, bound_ann=S.polarity(bound_ty),
                ann=S.polarity(body_ty), ty=body_ty)
        if isinstance(e, S.MatchPair):
            scrut_ty, scrut, candidates = self.elim_scrutinee(ctx, e.scrut,
                                                              "pair match")
            if not isinstance(scrut_ty, S.Tensor):
                raise _err("TypeMismatch", f"pair match on {scrut_ty}")
            binders = ((e.binder1, scrut_ty.left), (e.binder2, scrut_ty.right))
            body_ty, body = self.try_candidates(
                candidates, lambda g, g2: self.synth(g + binders + g2, e.body))
            return body_ty, dataclasses.replace(
                e, scrut=scrut, body=body, ann=S.polarity(body_ty), ty=body_ty)
        if isinstance(e, S.MatchUnit):
            scrut_ty, scrut, candidates = self.elim_scrutinee(ctx, e.scrut,
                                                              "unit match")
            if scrut_ty != S.UNIT:
                raise _err("TypeMismatch", f"unit match on {scrut_ty}")
            g, g2 = candidates[0]
            body_ty, body = self.synth(g + g2, e.body)
            return body_ty, dataclasses.replace(
                e, scrut=scrut, body=body, ann=S.polarity(body_ty), ty=body_ty)
        if isinstance(e, S.MatchSum):
            scrut_ty, scrut, candidates = self.elim_scrutinee(ctx, e.scrut,
                                                              "sum match")
            if not isinstance(scrut_ty, S.Sum):
                raise _err("TypeMismatch", f"sum match on {scrut_ty}")

            def both(g: Context, g2: Context):
                t1, b1 = self.synth(g + ((e.binder1, scrut_ty.left),) + g2, e.body1)
                b2 = self.check(g + ((e.binder2, scrut_ty.right),) + g2, e.body2, t1)
                return t1, b1, b2

            body_ty, body1, body2 = self.try_candidates(candidates, both)
            return body_ty, dataclasses.replace(
                e, scrut=scrut, body1=body1, body2=body2,
                ann=S.polarity(body_ty), ty=body_ty)
        if isinstance(e, S.Inj):
            raise _err("AnnotationRequired",
                       "cannot infer the other branch of an injection")
        raise _err("AnnotationRequired",
                   f"cannot infer a type for {type(e).__name__}")


### Brute-force declarative derivation search (test oracle)


def declarative_check(ctx: Context, e: S.Expr, ty: S.Type, mode: Mode,
                      runtime: bool = False) -> bool:
    """Does a derivation exist?  Searches every context split (and, in Linear
    mode, every partition irrespective of order); completely independent of
    the algorithmic checker's free-variable splitting.
    """
    return _d_check(tuple(ctx), e, ty, mode, runtime)


def _splits2(ctx: Context, mode: Mode):
    """All (Γ, Δ) decompositions of the context for a two-premise rule."""
    if mode is Mode.ORDERED:
        for i in range(len(ctx) + 1):
            yield ctx[:i], ctx[i:]
    else:
        n = len(ctx)
        for mask in range(1 << n):
            left = tuple(ctx[i] for i in range(n) if mask >> i & 1)
            right = tuple(ctx[i] for i in range(n) if not mask >> i & 1)
            yield left, right


def _splits3(ctx: Context, mode: Mode):
    """All (Γ, Δ, Γ′) decompositions for an elimination rule."""
    if mode is Mode.ORDERED:
        for i in range(len(ctx) + 1):
            for j in range(i, len(ctx) + 1):
                yield ctx[:i], ctx[i:j], ctx[j:]
    else:
        for rest, delta in _splits2(ctx, mode):
            yield rest, delta, ()


def _d_check(ctx, e, ty, mode, runtime) -> bool:
    if isinstance(e, S.Var):
        return ctx == ((e.name, ty),)
    if isinstance(e, S.ResLit):
        return runtime and ctx == () and ty == S.RES
    if isinstance(e, S.UnitVal):
        return ctx == () and ty == S.UNIT
    if isinstance(e, S.NewConst):
        return ctx == () and ty == NEW_TYPE
    if isinstance(e, S.DeleteConst):
        return ctx == () and ty == DELETE_TYPE
    if isinstance(e, S.Ascribe):
        return ty == e.ty_ann and _d_check(ctx, e.expr, ty, mode, runtime)
    if isinstance(e, S.Pair):
        if not isinstance(ty, S.Tensor):
            return False
        return any(_d_value(g, e.fst, ty.left, mode, runtime)
                   and _d_value(d, e.snd, ty.right, mode, runtime)
                   for g, d in _splits2(ctx, mode))
    if isinstance(e, S.Inj):
        if not isinstance(ty, S.Sum):
            return False
        inner = ty.left if e.tag == 1 else ty.right
        return _d_value(ctx, e.value, inner, mode, runtime)
    if isinstance(e, S.Lam):
        if not isinstance(ty, S.LArrow):
            return False
        if e.binder_ty is not None and e.binder_ty != ty.domain:
            return False
        return _d_check(((e.binder, ty.domain),) + ctx, e.body, ty.codomain,
                        mode, runtime)
    if isinstance(e, S.LazyPair):
        if not isinstance(ty, S.With):
            return False
        return (_d_check(ctx, e.fst, ty.left, mode, runtime)
                and _d_check(ctx, e.snd, ty.right, mode, runtime))
    if isinstance(e, S.Let):
        for g, d in _splits2(ctx, mode):
            for bound_ty in _d_synth(d, e.bound, mode, runtime):
                if (S.polarity(bound_ty) is Polarity.NEG
                        and not _d_is_value_at(e.bound, bound_ty)):
                    continue
                if _d_check(g + ((e.binder, bound_ty),), e.body, ty,
                            mode, runtime):
                    return True
        return False
    if isinstance(e, S.MatchPair):
        for g, d, g2 in _splits3(ctx, mode):
            for sty in _d_synth(d, e.scrut, mode, runtime):
                if (not isinstance(sty, S.Tensor)
                        or not _d_is_value_at(e.scrut, sty)):
                    continue
                mid = ((e.binder1, sty.left), (e.binder2, sty.right))
                if _d_check(g + mid + g2, e.body, ty, mode, runtime):
                    return True
        return False
    if isinstance(e, S.MatchUnit):
        for g, d, g2 in _splits3(ctx, mode):
            for sty in _d_synth(d, e.scrut, mode, runtime):
                if sty != S.UNIT or not _d_is_value_at(e.scrut, sty):
                    continue
                if _d_check(g + g2, e.body, ty, mode, runtime):
                    return True
        return False
    if isinstance(e, S.MatchSum):
        for g, d, g2 in _splits3(ctx, mode):
            for sty in _d_synth(d, e.scrut, mode, runtime):
                if (not isinstance(sty, S.Sum)
                        or not _d_is_value_at(e.scrut, sty)):
                    continue
                if (_d_check(g + ((e.binder1, sty.left),) + g2, e.body1, ty,
                             mode, runtime)
                        and _d_check(g + ((e.binder2, sty.right),) + g2,
                                     e.body2, ty, mode, runtime)):
                    return True
        return False
    if isinstance(e, S.App):
        for g, d in _splits2(ctx, mode):
            for fty in _d_synth(d, e.fn, mode, runtime):
                if not isinstance(fty, S.LArrow) or fty.codomain != ty:
                    continue
                if not _d_is_value_at(e.fn, fty):
                    continue
                if _d_value(g, e.arg, fty.domain, mode, runtime):
                    return True
        return False
    if isinstance(e, S.Proj):
        for vty in _d_synth(ctx, e.value, mode, runtime):
            if not isinstance(vty, S.With) or not _d_is_value_at(e.value, vty):
                continue
            if (vty.left if e.tag == 1 else vty.right) == ty:
                return True
        return False
    return False


def _d_value(ctx, v, ty, mode, runtime) -> bool:
    return _d_is_value_at(v, ty) and _d_check(ctx, v, ty, mode, runtime)


def _d_is_value_at(v: S.Expr, ty: S.Type) -> bool:
    """Is v a value at type ty?  Eliminators and lets are values exactly when
    their annotation is negative, i.e. when ty is a negative type."""
    while isinstance(v, S.Ascribe):
        if v.ty_ann != ty:
            return False
        v = v.expr
    if isinstance(v, (S.Let, S.MatchPair, S.MatchUnit, S.MatchSum, S.App,
                      S.Proj)):
        return S.polarity(ty) is Polarity.NEG
    return S.is_syntactic_value(v)


def _d_synth(ctx, v, mode, runtime):
    """Possible synthesized types for heads in elimination position."""
    out: set[S.Type] = set()
    if isinstance(v, S.Var):
        if len(ctx) == 1 and ctx[0][0] == v.name:
            out.add(ctx[0][1])
    elif isinstance(v, S.ResLit):
        if runtime and ctx == ():
            out.add(S.RES)
    elif isinstance(v, S.UnitVal):
        if ctx == ():
            out.add(S.UNIT)
    elif isinstance(v, S.NewConst):
        if ctx == ():
            out.add(NEW_TYPE)
    elif isinstance(v, S.DeleteConst):
        if ctx == ():
            out.add(DELETE_TYPE)
    elif isinstance(v, S.Ascribe):
        if _d_check(ctx, v.expr, v.ty_ann, mode, runtime):
            out.add(v.ty_ann)
    elif isinstance(v, S.Pair):
        for g, d in _splits2(ctx, mode):
            for lt in _d_synth(g, v.fst, mode, runtime):
                for rt in _d_synth(d, v.snd, mode, runtime):
                    if _d_is_value_at(v.fst, lt) and _d_is_value_at(v.snd, rt):
                        out.add(S.Tensor(lt, rt))
    elif isinstance(v, S.Inj):
        pass  # never synthesizable
    elif isinstance(v, S.Lam):
        if v.binder_ty is not None:
            for bt in _d_synth(((v.binder, v.binder_ty),) + ctx, v.body,
                               mode, runtime):
                out.add(S.LArrow(v.binder_ty, bt))
    elif isinstance(v, S.LazyPair):
        for lt in _d_synth(ctx, v.fst, mode, runtime):
            for rt in _d_synth(ctx, v.snd, mode, runtime):
                out.add(S.With(lt, rt))
    elif isinstance(v, S.App):
        for g, d in _splits2(ctx, mode):
            for fty in _d_synth(d, v.fn, mode, runtime):
                if (isinstance(fty, S.LArrow) and _d_is_value_at(v.fn, fty)
                        and _d_value(g, v.arg, fty.domain, mode, runtime)):
                    out.add(fty.codomain)
    elif isinstance(v, S.Proj):
        for vty in _d_synth(ctx, v.value, mode, runtime):
            if isinstance(vty, S.With) and _d_is_value_at(v.value, vty):
                out.add(vty.left if v.tag == 1 else vty.right)
    elif isinstance(v, S.Let):
        for g, d in _splits2(ctx, mode):
            for bty in _d_synth(d, v.bound, mode, runtime):
                if (S.polarity(bty) is Polarity.NEG
                        and not _d_is_value_at(v.bound, bty)):
                    continue
                for t in _d_synth(g + ((v.binder, bty),), v.body, mode, runtime):
                    out.add(t)
    elif isinstance(v, S.MatchPair):
        for g, d, g2 in _splits3(ctx, mode):
            for sty in _d_synth(d, v.scrut, mode, runtime):
                if isinstance(sty, S.Tensor) and _d_is_value_at(v.scrut, sty):
                    mid = ((v.binder1, sty.left), (v.binder2, sty.right))
                    out |= _d_synth(g + mid + g2, v.body, mode, runtime)
    elif isinstance(v, S.MatchUnit):
        for g, d, g2 in _splits3(ctx, mode):
            for sty in _d_synth(d, v.scrut, mode, runtime):
                if sty == S.UNIT and _d_is_value_at(v.scrut, sty):
                    out |= _d_synth(g + g2, v.body, mode, runtime)
    elif isinstance(v, S.MatchSum):
        for g, d, g2 in _splits3(ctx, mode):
            for sty in _d_synth(d, v.scrut, mode, runtime):
                if isinstance(sty, S.Sum) and _d_is_value_at(v.scrut, sty):
                    for t in _d_synth(g + ((v.binder1, sty.left),) + g2,
                                      v.body1, mode, runtime):
                        if _d_check(g + ((v.binder2, sty.right),) + g2,
                                    v.body2, t, mode, runtime):
                            out.add(t)
    return out


### Stack and command typing (runtime states)


def check_stack(stack, final_ty: S.Type, mode: Mode) -> S.Type:
    """Re-derive the stack typing judgment s : B ⊢ A.

    `stack` is a machine frame sequence (top first); final_ty is A, the type
    delivered at the empty stack.  Returns B, the type the current expression
    must have.  Frames carry recorded types as witnesses for the one piece of
    information the judgment does not determine (argument types, continuation
    binder types, the hidden component of a projection); everything else is
    re-checked from scratch.
    """
    from . import machine as M

    cur = final_ty
    for frame in reversed(stack):
        if frame.ann is not S.polarity(cur):
            raise _err("PolarityMismatch",
                       f"frame annotation {frame.ann} at type {cur}")
        if isinstance(frame, M.ArgFrame):
            arg_ty = frame.value.ty
            if arg_ty is None:
                raise _err("MissingWitness", "untyped argument frame")
            check_core((), frame.value, arg_ty, mode, runtime=True)
            if not S.is_value(frame.value):
                raise _err("PolarityMismatch", "argument frame holds a non-value")
            cur = S.LArrow(arg_ty, cur)
        elif isinstance(frame, M.KontFrame):
            binder_ty = frame.binder_ty
            if binder_ty is None:
                raise _err("MissingWitness", "untyped continuation frame")
            if S.polarity(binder_ty) is not Polarity.POS:
                raise _err("PolarityMismatch",
                           "continuation binder at a negative type")
            check_core(((frame.binder, binder_ty),), frame.body, cur, mode,
                       runtime=True)
            cur = binder_ty
        elif isinstance(frame, M.ProjFrame):
            wty = frame.with_ty
            if not isinstance(wty, S.With):
                raise _err("MissingWitness", "projection frame lacks its type")
            comp = wty.left if frame.index == 1 else wty.right
            if comp != cur:
                raise _err("TypeMismatch",
                           f"projection component {comp}, stack wants {cur}")
            cur = wty
        else:
            raise _err("MissingWitness", f"unknown frame {frame!r}")
    return cur


def check_command_typing(c, ty: S.Type, mode: Mode,
                         cache: Optional[dict] = None) -> None:
    """Re-derive the command typing judgment for machine state c at program
    type ty.  Raises CheckError when the state is ill-typed.

    An optional cache (shared across the states of one run) memoizes stack
    and expression judgments, which repeat heavily along a trace.
    """
    if cache is None:
        cache = {}
    skey = ("stack", c.stack, ty)
    if skey not in cache:
        cache[skey] = check_stack(c.stack, ty, mode)
    expr_ty = cache[skey]
    if c.expr.ty is not None and c.expr.ty != expr_ty:
        raise _err("TypeMismatch",
                   f"recorded type {c.expr.ty} differs from stack type {expr_ty}")
    ekey = ("expr", c.expr, expr_ty)
    if ekey not in cache:
        check_core((), c.expr, expr_ty, mode, runtime=True)
        cache[ekey] = True
    if c.ann is not S.polarity(expr_ty):
        raise _err("PolarityMismatch",
                   f"command polarity {c.ann} at type {expr_ty}")
