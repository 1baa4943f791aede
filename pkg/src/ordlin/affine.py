"""Checker for the affine dialect: destructors (drop), exceptions (raise and
try/unless), allocation that throws on failure, and explicit variable
exchange (move).

The context discipline is ordered, as in the core checker: splits must be
contiguous and `move` is the one and only way to exchange two (adjacent)
variables.  The checker returns full derivation trees; the elaborator
consumes them to translate programs into the core calculus.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from . import syntax as S
from . import typecheck as T
from .typecheck import CheckError, Context, _err


class AffineMode(Enum):
    NOMOVE = "nomove"
    WITHMOVE = "withmove"


NEW_TYPE_AFFINE = S.LArrow(S.UNIT, S.RES)


@dataclass(frozen=True)
class ExceptionConfig:
    """The exception type E and the value thrown on allocation failure."""
    exc_type: S.Type = S.UNIT
    new_fail: S.Expr = field(default_factory=S.UnitVal)

    def validate(self):
        if not S.is_central(self.exc_type):
            raise _err("NotCentral",
                       f"exception type {self.exc_type} is not central")
        T.check_core((), self.new_fail, self.exc_type, T.Mode.ORDERED)


DEFAULT_CONFIG = ExceptionConfig()


@dataclass(frozen=True)
class Derivation:
    """One node of an affine typing derivation."""
    rule: str
    ctx: Context
    expr: S.Expr
    ty: S.Type
    subs: tuple["Derivation", ...] = ()
    is_value: bool = False


def check_affine(ctx: Context, e: S.Expr, ty: S.Type,
                 amode: AffineMode = AffineMode.WITHMOVE,
                 cfg: ExceptionConfig = DEFAULT_CONFIG) -> Derivation:
    cfg.validate()
    ck = _AffineChecker(amode, cfg)
    ck.verify_consumption(ctx, e)
    return ck.check(ctx, e, ty)


def synthesize_affine(ctx: Context, e: S.Expr,
                      amode: AffineMode = AffineMode.WITHMOVE,
                      cfg: ExceptionConfig = DEFAULT_CONFIG) -> Derivation:
    cfg.validate()
    ck = _AffineChecker(amode, cfg)
    ck.verify_consumption(ctx, e)
    return ck.synth(ctx, e)


class _AffineChecker:
    def __init__(self, amode: AffineMode, cfg: ExceptionConfig):
        self.amode = amode
        self.cfg = cfg

    ## context plumbing (ordered: contiguous splits only)

    def verify_consumption(self, ctx: Context, e: S.Expr):
        from collections import Counter
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
        left = tuple(p for p in ctx if p[0] not in right_fv)
        right = tuple(p for p in ctx if p[0] in right_fv)
        if ctx != left + right:
            raise _err("OrderViolation",
                       f"the {what} must use a suffix of the context")
        return left, right

    def split_middle(self, ctx: Context, mid_fv: set[str], what: str):
        delta = tuple(p for p in ctx if p[0] in mid_fv)
        rest = tuple(p for p in ctx if p[0] not in mid_fv)
        if delta:
            positions = [i for i, p in enumerate(ctx) if p[0] in mid_fv]
            lo, hi = positions[0], positions[-1]
            if hi - lo + 1 != len(positions):
                raise _err("OrderViolation",
                           f"the {what} must use a contiguous block")
            return delta, [(ctx[:lo], ctx[hi + 1:])]
        return delta, [((rest[:i]), (rest[i:])) for i in range(len(rest) + 1)]

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

    ## checking

    def check(self, ctx: Context, e: S.Expr, ty: S.Type) -> Derivation:
        self.verify_consumption(ctx, e)
        if isinstance(e, S.DeleteConst):
            raise _err("DeleteForbidden",
                       "explicit delete does not exist in the affine dialect; "
                       "use drop")
        if isinstance(e, S.ResLit):
            raise _err("ResourceLiteral", "resource literal in source term")
        if isinstance(e, S.Var):
            if len(ctx) != 1 or ctx[0][0] != e.name:
                raise _err("UnboundVariable", f"variable {e.name}")
            if ctx[0][1] != ty:
                raise _err("TypeMismatch",
                           f"variable {e.name} has type {ctx[0][1]}, wanted {ty}")
            return Derivation("var", ctx, e, ty, is_value=True)
        if isinstance(e, S.UnitVal):
            if ty != S.UNIT:
                raise _err("TypeMismatch", f"() at {ty}")
            return Derivation("unit", ctx, e, ty, is_value=True)
        if isinstance(e, S.NewConst):
            if ty != NEW_TYPE_AFFINE:
                raise _err("TypeMismatch",
                           f"new has type {NEW_TYPE_AFFINE}, wanted {ty}")
            return Derivation("new", ctx, e, ty, is_value=True)
        if isinstance(e, S.DropConst):
            if not isinstance(ty, S.LArrow) or ty.codomain != S.UNIT:
                raise _err("TypeMismatch", f"drop has type A -o 1, wanted {ty}")
            return Derivation("drop", ctx, e, ty, is_value=True)
        if isinstance(e, S.RaiseConst):
            if not isinstance(ty, S.LArrow) or ty.domain != self.cfg.exc_type:
                raise _err("TypeMismatch",
                           f"raise has type {self.cfg.exc_type} -o A, "
                           f"wanted {ty}")
            return Derivation("raise", ctx, e, ty, is_value=True)
        if isinstance(e, S.Pair):
            if not isinstance(ty, S.Tensor):
                raise _err("TypeMismatch", f"pair at non-tensor type {ty}")
            left, right = self.split_suffix(ctx, S.free_vars(e.snd),
                                            "second pair component")
            fst = self.check_value(left, e.fst, ty.left)
            snd = self.check_value(right, e.snd, ty.right)
            return Derivation("pair", ctx, e, ty, (fst, snd), is_value=True)
        if isinstance(e, S.Inj):
            if not isinstance(ty, S.Sum):
                raise _err("TypeMismatch", f"injection at non-sum type {ty}")
            inner = ty.left if e.tag == 1 else ty.right
            sub = self.check_value(ctx, e.value, inner)
            return Derivation(f"inj{e.tag}", ctx, e, ty, (sub,), is_value=True)
        if isinstance(e, S.Lam):
            if not isinstance(ty, S.LArrow):
                raise _err("TypeMismatch", f"function at non-arrow type {ty}")
            if e.binder_ty is not None and e.binder_ty != ty.domain:
                raise _err("TypeMismatch",
                           f"binder ascription {e.binder_ty} vs {ty.domain}")
            body = self.check(((e.binder, ty.domain),) + ctx, e.body,
                              ty.codomain)
            return Derivation("lam", ctx, e, ty, (body,), is_value=True)
        if isinstance(e, S.LazyPair):
            if not isinstance(ty, S.With):
                raise _err("TypeMismatch", f"lazy pair at non-with type {ty}")
            fst = self.check(ctx, e.fst, ty.left)
            snd = self.check(ctx, e.snd, ty.right)
            return Derivation("lazy-pair", ctx, e, ty, (fst, snd),
                              is_value=True)
        if isinstance(e, S.Let):
            left, right = self.split_suffix(ctx, S.free_vars(e.bound),
                                            "bound term of a let")
            bound = self.synth(right, e.bound)
            body = self.check(left + ((e.binder, bound.ty),),
                              self.autodrop(e.binder, e.body), ty)
            return Derivation("let", ctx, e, ty, (bound, body))
        if isinstance(e, S.MatchPair):
            scrut, candidates = self.elim_scrutinee(ctx, e.scrut, "pair match")
            if not isinstance(scrut.ty, S.Tensor):
                raise _err("TypeMismatch", f"pair match on {scrut.ty}")
            binders = ((e.binder1, scrut.ty.left), (e.binder2, scrut.ty.right))
            body = self.try_candidates(
                candidates,
                lambda g, g2: self.check(g + binders + g2, e.body, ty))
            return Derivation("match-pair", ctx, e, ty, (scrut, body))
        if isinstance(e, S.MatchUnit):
            scrut, candidates = self.elim_scrutinee(ctx, e.scrut, "unit match")
            if scrut.ty != S.UNIT:
                raise _err("TypeMismatch", f"unit match on {scrut.ty}")
            g, g2 = candidates[0]
            body = self.check(g + g2, e.body, ty)
            return Derivation("match-unit", ctx, e, ty, (scrut, body))
        if isinstance(e, S.MatchSum):
            scrut, candidates = self.elim_scrutinee(ctx, e.scrut, "sum match")
            if not isinstance(scrut.ty, S.Sum):
                raise _err("TypeMismatch", f"sum match on {scrut.ty}")

            def both(g, g2):
                b1 = self.check(g + ((e.binder1, scrut.ty.left),) + g2,
                                e.body1, ty)
                b2 = self.check(g + ((e.binder2, scrut.ty.right),) + g2,
                                e.body2, ty)
                return b1, b2

            b1, b2 = self.try_candidates(candidates, both)
            return Derivation("match-sum", ctx, e, ty, (scrut, b1, b2))
        if isinstance(e, S.App):
            left, right = self.split_suffix(ctx, S.free_vars(e.fn), "function")
            fn = self.synth_function(right, e.fn, left, e.arg, ty)
            if fn.ty.codomain != ty:
                raise _err("TypeMismatch",
                           f"application returns {fn.ty.codomain}, wanted {ty}")
            arg = self.check_value(left, e.arg, fn.ty.domain)
            return Derivation("app", ctx, e, ty, (arg, fn))
        if isinstance(e, S.Proj):
            v = self.synth(ctx, e.value)
            if not isinstance(v.ty, S.With):
                raise _err("TypeMismatch", f"projection of a {v.ty}")
            self.require_value(v)
            comp = v.ty.left if e.tag == 1 else v.ty.right
            if comp != ty:
                raise _err("TypeMismatch",
                           f"projection gives {comp}, wanted {ty}")
            return Derivation(f"proj{e.tag}", ctx, e, ty, (v,))
        if isinstance(e, S.MoveIn):
            return self.check_move(ctx, e, ty)
        if isinstance(e, S.TryIn):
            return self.check_try(ctx, e, ty, expected=ty)
        if isinstance(e, S.Ascribe):
            if e.ty_ann != ty:
                raise _err("TypeMismatch",
                           f"ascription {e.ty_ann} against expected {ty}")
            return self.check(ctx, e.expr, ty)
        raise _err("TypeMismatch", f"cannot check {type(e).__name__}")

    def check_value(self, ctx: Context, v: S.Expr, ty: S.Type) -> Derivation:
        d = self.check(ctx, v, ty)
        self.require_value(d)
        return d

    def require_value(self, d: Derivation):
        if not d.is_value:
            raise _err("PolarityMismatch",
                       f"{type(d.expr).__name__} is not a value here")

    def elim_scrutinee(self, ctx: Context, scrut: S.Expr, what: str):
        delta, candidates = self.split_middle(ctx, S.free_vars(scrut), what)
        d = self.synth(delta, scrut)
        self.require_value(d)
        return d, candidates

    def autodrop(self, binder: str, body: S.Expr) -> S.Expr:
        """Affine weakening: a binder sitting at the right end of the premise
        context (let and try binders) may go unused; its destructor must
        still run, so rewrite the body to drop it explicitly."""
        if binder in S.free_vars(body):
            return body
        z = S.gensym("_w")
        return S.Let(z, S.App(S.DropConst(), S.Var(binder)),
                     S.MatchUnit(S.Var(z), body))

    def check_move(self, ctx: Context, e: S.MoveIn, ty: S.Type) -> Derivation:
        if self.amode is AffineMode.NOMOVE:
            raise _err("MoveForbidden",
                       "move is not available in the no-move fragment")
        # move(x, y) in t: the context lists y immediately before x; the
        # premise sees them exchanged.
        names = [n for n, _ in ctx]
        try:
            iy = names.index(e.var2)
        except ValueError:
            raise _err("UnboundVariable", f"variable {e.var2}")
        if iy + 1 >= len(ctx) or names[iy + 1] != e.var1:
            raise _err("OrderViolation",
                       f"move({e.var1}, {e.var2}) needs {e.var2} immediately "
                       f"before {e.var1} in the context")
        swapped = (ctx[:iy] + (ctx[iy + 1], ctx[iy]) + ctx[iy + 2:])
        body = self.check(swapped, e.body, ty)
        return Derivation("move", ctx, e, ty, (body,))

    def check_try(self, ctx: Context, e: S.TryIn, ty: S.Type,
                  expected: S.Type) -> Derivation:
        left, right = self.split_suffix(ctx, S.free_vars(e.bound),
                                        "bound term of a try")
        bound = self.synth(right, e.bound)
        if S.polarity(bound.ty) is not S.Polarity.POS:
            raise _err("TryOnNegative",
                       f"try scrutinizes a term of negative type {bound.ty}")
        body = self.check(left + ((e.binder, bound.ty),),
                          self.autodrop(e.binder, e.body), expected)
        handler = self.check(left + ((e.exc_binder, self.cfg.exc_type),),
                             self.autodrop(e.exc_binder, e.handler), expected)
        return Derivation("try", ctx, e, expected, (bound, body, handler))

    ## synthesis

    def synth(self, ctx: Context, e: S.Expr) -> Derivation:
        self.verify_consumption(ctx, e)
        if isinstance(e, S.Var):
            if len(ctx) != 1 or ctx[0][0] != e.name:
                raise _err("UnboundVariable", f"variable {e.name}")
            return Derivation("var", ctx, e, ctx[0][1], is_value=True)
        if isinstance(e, S.UnitVal):
            return Derivation("unit", ctx, e, S.UNIT, is_value=True)
        if isinstance(e, S.NewConst):
            return Derivation("new", ctx, e, NEW_TYPE_AFFINE, is_value=True)
        if isinstance(e, S.Ascribe):
            return self.check(ctx, e.expr, e.ty_ann)
        if isinstance(e, S.Pair):
            left, right = self.split_suffix(ctx, S.free_vars(e.snd),
                                            "second pair component")
            fst = self.synth(left, e.fst)
            snd = self.synth(right, e.snd)
            self.require_value(fst)
            self.require_value(snd)
            return Derivation("pair", ctx, e, S.Tensor(fst.ty, snd.ty),
                              (fst, snd), is_value=True)
        if isinstance(e, S.Lam):
            if e.binder_ty is None:
                raise _err("AnnotationRequired",
                           "cannot infer the domain of an unannotated function")
            body = self.synth(((e.binder, e.binder_ty),) + ctx, e.body)
            return Derivation("lam", ctx, e, S.LArrow(e.binder_ty, body.ty),
                              (body,), is_value=True)
        if isinstance(e, S.LazyPair):
            fst = self.synth(ctx, e.fst)
            snd = self.synth(ctx, e.snd)
            return Derivation("lazy-pair", ctx, e, S.With(fst.ty, snd.ty),
                              (fst, snd), is_value=True)
        if isinstance(e, S.App):
            left, right = self.split_suffix(ctx, S.free_vars(e.fn), "function")
            fn = self.synth_function(right, e.fn, left, e.arg, None)
            arg = self.check_value(left, e.arg, fn.ty.domain)
            return Derivation("app", ctx, e, fn.ty.codomain, (arg, fn))
        if isinstance(e, S.Proj):
            v = self.synth(ctx, e.value)
            if not isinstance(v.ty, S.With):
                raise _err("TypeMismatch", f"projection of a {v.ty}")
            self.require_value(v)
            comp = v.ty.left if e.tag == 1 else v.ty.right
            return Derivation(f"proj{e.tag}", ctx, e, comp, (v,))
        if isinstance(e, S.Let):
            left, right = self.split_suffix(ctx, S.free_vars(e.bound),
                                            "bound term of a let")
            bound = self.synth(right, e.bound)
            body = self.synth(left + ((e.binder, bound.ty),),
                              self.autodrop(e.binder, e.body))
            return Derivation("let", ctx, e, body.ty, (bound, body))
        if isinstance(e, S.MatchPair):
            scrut, candidates = self.elim_scrutinee(ctx, e.scrut, "pair match")
            if not isinstance(scrut.ty, S.Tensor):
                raise _err("TypeMismatch", f"pair match on {scrut.ty}")
            binders = ((e.binder1, scrut.ty.left), (e.binder2, scrut.ty.right))
            body = self.try_candidates(
                candidates, lambda g, g2: self.synth(g + binders + g2, e.body))
            return Derivation("match-pair", ctx, e, body.ty, (scrut, body))
        if isinstance(e, S.MatchUnit):
            scrut, candidates = self.elim_scrutinee(ctx, e.scrut, "unit match")
            if scrut.ty != S.UNIT:
                raise _err("TypeMismatch", f"unit match on {scrut.ty}")
            g, g2 = candidates[0]
            body = self.synth(g + g2, e.body)
            return Derivation("match-unit", ctx, e, body.ty, (scrut, body))
        if isinstance(e, S.MatchSum):
            scrut, candidates = self.elim_scrutinee(ctx, e.scrut, "sum match")
            if not isinstance(scrut.ty, S.Sum):
                raise _err("TypeMismatch", f"sum match on {scrut.ty}")

            def both(g, g2):
                b1 = self.synth(g + ((e.binder1, scrut.ty.left),) + g2,
                                e.body1)
                b2 = self.check(g + ((e.binder2, scrut.ty.right),) + g2,
                                e.body2, b1.ty)
                return b1, b2

            b1, b2 = self.try_candidates(candidates, both)
            return Derivation("match-sum", ctx, e, b1.ty, (scrut, b1, b2))
        if isinstance(e, S.MoveIn):
            if self.amode is AffineMode.NOMOVE:
                raise _err("MoveForbidden",
                           "move is not available in the no-move fragment")
            names = [n for n, _ in ctx]
            if e.var2 not in names:
                raise _err("UnboundVariable", f"variable {e.var2}")
            iy = names.index(e.var2)
            if iy + 1 >= len(ctx) or names[iy + 1] != e.var1:
                raise _err("OrderViolation",
                           f"move({e.var1}, {e.var2}) needs {e.var2} "
                           f"immediately before {e.var1} in the context")
            swapped = (ctx[:iy] + (ctx[iy + 1], ctx[iy]) + ctx[iy + 2:])
            body = self.synth(swapped, e.body)
            return Derivation("move", ctx, e, body.ty, (body,))
        if isinstance(e, S.TryIn):
            left, right = self.split_suffix(ctx, S.free_vars(e.bound),
                                            "bound term of a try")
            bound = self.synth(right, e.bound)
            if S.polarity(bound.ty) is not S.Polarity.POS:
                raise _err("TryOnNegative",
                           f"try scrutinizes a negative type {bound.ty}")
            body = self.synth(left + ((e.binder, bound.ty),),
                              self.autodrop(e.binder, e.body))
            handler = self.check(left + ((e.exc_binder, self.cfg.exc_type),),
                                 self.autodrop(e.exc_binder, e.handler),
                                 body.ty)
            return Derivation("try", ctx, e, body.ty, (bound, body, handler))
        if isinstance(e, S.DeleteConst):
            raise _err("DeleteForbidden",
                       "explicit delete does not exist in the affine dialect; "
                       "use drop")
        raise _err("AnnotationRequired",
                   f"cannot infer a type for {type(e).__name__}")

    def synth_function(self, fn_ctx: Context, fn: S.Expr, arg_ctx: Context,
                       arg: S.Expr, expected: Optional[S.Type]) -> Derivation:
        """Synthesize the function of an application.  drop and raise have
        polymorphic types, pinned down by the argument (and, for raise, the
        expected result)."""
        if isinstance(fn, S.DropConst):
            if fn_ctx:
                raise _err("UnusedVariable", "drop uses no variables")
            arg_d = self.synth(arg_ctx, arg)
            return Derivation("drop", fn_ctx, fn,
                              S.LArrow(arg_d.ty, S.UNIT), is_value=True)
        if isinstance(fn, S.RaiseConst):
            if fn_ctx:
                raise _err("UnusedVariable", "raise uses no variables")
            if expected is None:
                raise _err("AnnotationRequired",
                           "cannot infer the result type of raise")
            return Derivation("raise", fn_ctx, fn,
                              S.LArrow(self.cfg.exc_type, expected),
                              is_value=True)
        d = self.synth(fn_ctx, fn)
        if not isinstance(d.ty, S.LArrow):
            raise _err("TypeMismatch", f"application of a {d.ty}")
        self.require_value(d)
        return d
