"""Translation of checked affine programs into the core calculus.

Types translate with two shifts (up(A) = A + E, down(A) = A & 1): positive
types keep their structure, negative values become lazy pairs carrying their
own destructor.  Affine values of type A become core values of type pos(A);
affine expressions become core values of type down(neg(A)) whose first
component either returns normally (inl) or escapes with an exception (inr)
after unwinding — dropping — its context.  Running an affine expression means
running the first projection of its translation.
"""

from __future__ import annotations

from enum import Enum
from typing import Optional

from . import machine as M
from . import syntax as S
from . import typecheck as T
from .affine import (AffineMode, DEFAULT_CONFIG, Derivation, ExceptionConfig,
                     check_affine)
from .typecheck import Context, _err


class NotCentral(Exception):
    pass


class Flavor(Enum):
    POS = "pos"
    NEG = "neg"


class Direction(Enum):
    FWD = "fwd"
    INV = "inv"


def up(a: S.Type, cfg: ExceptionConfig = DEFAULT_CONFIG) -> S.Type:
    return S.Sum(a, cfg.exc_type)


def down(a: S.Type) -> S.Type:
    return S.With(a, S.UNIT)


def translate_type(a: S.Type, flavor: Flavor,
                   cfg: ExceptionConfig = DEFAULT_CONFIG) -> S.Type:
    if flavor is Flavor.POS:
        if isinstance(a, (S.Unit, S.Res)):
            return a
        if isinstance(a, S.Tensor):
            return S.Tensor(translate_type(a.left, Flavor.POS, cfg),
                            translate_type(a.right, Flavor.POS, cfg))
        if isinstance(a, S.Sum):
            return S.Sum(translate_type(a.left, Flavor.POS, cfg),
                         translate_type(a.right, Flavor.POS, cfg))
        return down(translate_type(a, Flavor.NEG, cfg))
    if isinstance(a, S.LArrow):
        return S.LArrow(translate_type(a.domain, Flavor.POS, cfg),
                        translate_type(a.codomain, Flavor.NEG, cfg))
    if isinstance(a, S.With):
        return S.With(translate_type(a.left, Flavor.NEG, cfg),
                      translate_type(a.right, Flavor.NEG, cfg))
    return up(translate_type(a, Flavor.POS, cfg), cfg)


def expr_type(a: S.Type, cfg: ExceptionConfig = DEFAULT_CONFIG) -> S.Type:
    """The core type of a translated affine expression of type a."""
    return down(translate_type(a, Flavor.NEG, cfg))


def _seq(first: S.Expr, first_is_value: bool, rest: S.Expr) -> S.Expr:
    """first; rest at unit type, in desugared form."""
    if first_is_value:
        return S.MatchUnit(first, rest)
    z = S.gensym("_q")
    return S.Let(z, S.Ascribe(first, S.UNIT),
                 S.MatchUnit(S.Var(z), rest))


### Destructors


_drop_memo: dict = {}


def build_drop(a: S.Type) -> S.Expr:
    """The destructor value at pos(a) -o 1 for a source type a."""
    if a in _drop_memo:
        return _drop_memo[a]
    arrow = S.LArrow(translate_type(a, Flavor.POS), S.UNIT)
    if isinstance(a, S.Unit):
        v = S.gensym("_v")
        body: S.Expr = S.Var(v)
        binder = v
    elif isinstance(a, S.Res):
        r = S.gensym("_r")
        body = S.App(S.DeleteConst(), S.Var(r))
        binder = r
    elif isinstance(a, S.Tensor):
        p, x, y = S.gensym("_p"), S.gensym("_a"), S.gensym("_b")
        body = S.MatchPair(
            S.Var(p), x, y,
            _seq(S.App(build_drop(a.right), S.Var(y)), False,
                 S.App(build_drop(a.left), S.Var(x))))
        binder = p
    elif isinstance(a, S.Sum):
        s, x, y = S.gensym("_s"), S.gensym("_a"), S.gensym("_b")
        body = S.MatchSum(S.Var(s),
                          x, S.App(build_drop(a.left), S.Var(x)),
                          y, S.App(build_drop(a.right), S.Var(y)))
        binder = s
    else:  # negative types carry their destructor as the second projection
        n = S.gensym("_n")
        body = S.Proj(2, S.Var(n))
        binder = n
    out = S.Ascribe(S.Lam(binder, body), arrow)
    _drop_memo[a] = out
    return out


def build_drop_ctx(g: Context) -> S.Expr:
    """pos(Γ) ⊢ 1, dropping each variable from right to left."""
    if not g:
        return S.UnitVal()
    (x, a) = g[-1]
    return _seq(S.App(build_drop(a), S.Var(x)), False, build_drop_ctx(g[:-1]))


### Swaps between a type and a central type


_swap_memo: dict = {}


def build_swap(a: S.Type, w: S.Type, direction: Direction) -> S.Expr:
    """Fwd: (a⊗w) ⊸ (w⊗a); Inv: (w⊗a) ⊸ (a⊗w), for central w.

    Here a and w are core types; the term's shape depends only on w.
    """
    if not S.is_central(w):
        raise NotCentral(f"{w} is not a central type")
    key = (a, w, direction)
    if key in _swap_memo:
        return _swap_memo[key]
    fwd = direction is Direction.FWD
    arrow = (S.LArrow(S.Tensor(a, w), S.Tensor(w, a)) if fwd
             else S.LArrow(S.Tensor(w, a), S.Tensor(a, w)))
    p, av, wv = S.gensym("_p"), S.gensym("_a"), S.gensym("_w")

    def pair(first, second):
        return S.Pair(first, second)

    if isinstance(w, S.Unit):
        i = wv
        if fwd:
            inner = S.MatchUnit(S.Var(i), pair(S.UnitVal(), S.Var(av)))
            body = S.MatchPair(S.Var(p), av, i, inner)
        else:
            inner = S.MatchUnit(S.Var(i), pair(S.Var(av), S.UnitVal()))
            body = S.MatchPair(S.Var(p), i, av, inner)
    elif isinstance(w, S.Sum):
        w1, w2, q = S.gensym("_w"), S.gensym("_w"), S.gensym("_p")

        def branch(wi, part, tag):
            sub = build_swap(a, part, direction)
            if fwd:
                call = S.App(sub, pair(S.Var(av), S.Var(wi)))
                res = S.MatchPair(S.Var(q), wi, av,
                                  pair(S.Inj(tag, S.Var(wi)), S.Var(av)))
            else:
                call = S.App(sub, pair(S.Var(wi), S.Var(av)))
                res = S.MatchPair(S.Var(q), av, wi,
                                  pair(S.Var(av), S.Inj(tag, S.Var(wi))))
            return S.Let(q, call, res)

        split = S.MatchSum(S.Var(wv),
                           w1, branch(w1, w.left, 1),
                           w2, branch(w2, w.right, 2))
        body = (S.MatchPair(S.Var(p), av, wv, split) if fwd
                else S.MatchPair(S.Var(p), wv, av, split))
    elif isinstance(w, S.Tensor):
        w1, w2 = S.gensym("_w"), S.gensym("_w")
        q1, q2, r = S.gensym("_p"), S.gensym("_p"), S.gensym("_p")
        if fwd:
            call1 = S.App(build_swap(S.Tensor(a, w.left), w.right, direction),
                          pair(pair(S.Var(av), S.Var(w1)), S.Var(w2)))
            call2 = S.App(build_swap(S.Tensor(w.right, a), w.left, direction),
                          pair(pair(S.Var(w2), S.Var(av)), S.Var(w1)))
            inner2 = S.Let(
                q2, call2,
                S.MatchPair(S.Var(q2), w1, r,
                            S.MatchPair(S.Var(r), w2, av,
                                        pair(pair(S.Var(w1), S.Var(w2)),
                                             S.Var(av)))))
            inner1 = S.Let(
                q1, call1,
                S.MatchPair(S.Var(q1), w2, r,
                            S.MatchPair(S.Var(r), av, w1, inner2)))
            body = S.MatchPair(S.Var(p), av, wv,
                               S.MatchPair(S.Var(wv), w1, w2, inner1))
        else:
            call1 = S.App(build_swap(S.Tensor(w.right, a), w.left, direction),
                          pair(S.Var(w1), pair(S.Var(w2), S.Var(av))))
            call2 = S.App(build_swap(S.Tensor(a, w.left), w.right, direction),
                          pair(S.Var(w2), pair(S.Var(av), S.Var(w1))))
            inner2 = S.Let(
                q2, call2,
                S.MatchPair(S.Var(q2), r, w2,
                            S.MatchPair(S.Var(r), av, w1,
                                        pair(S.Var(av),
                                             pair(S.Var(w1), S.Var(w2))))))
            inner1 = S.Let(
                q1, call1,
                S.MatchPair(S.Var(q1), r, w1,
                            S.MatchPair(S.Var(r), w2, av, inner2)))
            body = S.MatchPair(S.Var(p), wv, av,
                               S.MatchPair(S.Var(wv), w1, w2, inner1))
    else:
        raise NotCentral(f"{w} is not a central type")
    out = S.Ascribe(S.Lam(p, body), arrow)
    _swap_memo[key] = out
    return out


### Unwinding and raising


def build_unwind(g: Context, exc_var: str = "e",
                 cfg: ExceptionConfig = DEFAULT_CONFIG) -> S.Expr:
    """pos(Γ), e:E ⊢ E: swap the exception left across each variable,
    dropping the variable on the way."""
    if not g:
        return S.Var(exc_var)
    (x, a) = g[-1]
    p = S.gensym("_p")
    a_pos = translate_type(a, Flavor.POS, cfg)
    swap = build_swap(a_pos, cfg.exc_type, Direction.FWD)
    rest = _seq(S.App(build_drop(a), S.Var(x)), False,
                build_unwind(g[:-1], exc_var, cfg))
    return S.Let(p, S.App(swap, S.Pair(S.Var(x), S.Var(exc_var))),
                 S.MatchPair(S.Var(p), exc_var, x, rest))


def build_raise(a: S.Type, g: Context, exc_var: str = "e",
                cfg: ExceptionConfig = DEFAULT_CONFIG) -> S.Expr:
    """pos(Γ), e:E ⊢ neg(a): inhabit any type by dropping the context and
    propagating the exception."""
    if isinstance(a, S.LArrow):
        b = S.gensym("_b")
        return S.Lam(b, build_raise(a.codomain, ((b, a.domain),) + g,
                                    exc_var, cfg))
    if isinstance(a, S.With):
        return S.LazyPair(build_raise(a.left, g, exc_var, cfg),
                          build_raise(a.right, g, exc_var, cfg))
    e2 = S.gensym("_e")
    return S.Let(e2, S.Ascribe(build_unwind(g, exc_var, cfg), cfg.exc_type),
                 S.Inj(2, S.Var(e2)))


def _raise_down(a: S.Type, g: Context, exc_var: str,
                cfg: ExceptionConfig) -> S.Expr:
    """pos(Γ), e:E ⊢ down(neg(a)): the exceptional branch of an eager let.

    The second (discard) component also has to consume the context, so it is
    a context drop rather than a bare unit.
    """
    return S.LazyPair(build_raise(a, g, exc_var, cfg),
                      build_drop_ctx(g + ((exc_var, cfg.exc_type),)))


### Term translation


def elaborate(d: Derivation, cfg: ExceptionConfig = DEFAULT_CONFIG) -> S.Expr:
    """Translate a checked affine derivation.  Value derivations yield a core
    value at pos(A); expression derivations yield one at down(neg(A))."""
    if d.is_value:
        return translate_value(d, cfg)
    return translate_expr(d, cfg)


def elaborate_expression(d: Derivation,
                         cfg: ExceptionConfig = DEFAULT_CONFIG) -> S.Expr:
    """Translate a derivation into expression position: always down(neg(A)),
    coercing top-level positive values."""
    return translate_expr(d, cfg)


def translate_value(d: Derivation, cfg: ExceptionConfig) -> S.Expr:
    rule = d.rule
    if rule == "var":
        return S.Var(d.expr.name)
    if rule == "unit":
        return S.UnitVal()
    if rule == "pair":
        return S.Pair(translate_value(d.subs[0], cfg),
                      translate_value(d.subs[1], cfg))
    if rule in ("inj1", "inj2"):
        return S.Inj(int(rule[-1]), translate_value(d.subs[0], cfg))
    if rule == "lam":
        body = _proj1(d.subs[0], cfg)
        return S.LazyPair(S.Lam(d.expr.binder, body), build_drop_ctx(d.ctx))
    if rule == "lazy-pair":
        return S.LazyPair(
            S.LazyPair(_proj1(d.subs[0], cfg), _proj1(d.subs[1], cfg)),
            build_drop_ctx(d.ctx))
    if rule == "drop":
        # the first component turns the destructor's unit into a normal
        # (inl) return at the throwable unit type
        a = d.ty.domain
        x, u = S.gensym("_a"), S.gensym("_u")
        body = S.Let(u, S.App(build_drop(a), S.Var(x)),
                     S.Inj(1, S.Var(u)))
        return S.LazyPair(S.Lam(x, body), S.UnitVal())
    if rule == "raise":
        ev = S.gensym("_e")
        return S.LazyPair(S.Lam(ev, build_raise(d.ty.codomain, (), ev, cfg)),
                          S.UnitVal())
    if rule == "new":
        z, x, r, i = (S.gensym("_z"), S.gensym("_x"), S.gensym("_r"),
                      S.gensym("_i"))
        body = S.Let(
            x, S.App(S.NewConst(), S.Var(z)),
            S.MatchSum(S.Var(x),
                       r, S.Inj(1, S.Var(r)),
                       i, S.MatchUnit(S.Var(i), S.Inj(2, cfg.new_fail))))
        return S.LazyPair(S.Lam(z, body), S.UnitVal())
    raise _err("Untranslatable", f"value rule {rule}")


def translate_expr(d: Derivation, cfg: ExceptionConfig) -> S.Expr:
    rule = d.rule
    if d.is_value:
        if S.polarity(d.ty) is S.Polarity.POS:
            # coercion of a positive value into expression position
            return S.LazyPair(S.Inj(1, translate_value(d, cfg)),
                              build_drop_ctx(d.ctx))
        return translate_value(d, cfg)
    if rule == "let":
        bound, body = d.subs
        binder = d.expr.binder
        if bound.is_value or S.polarity(bound.ty) is S.Polarity.NEG:
            payload = elaborate(bound, cfg)
            return S.Let(binder,
                         S.Ascribe(payload,
                                   translate_type(bound.ty, Flavor.POS, cfg)),
                         translate_expr(body, cfg))
        # eager positive binding: evaluate, then continue or unwind
        s, ev = S.gensym("_s"), S.gensym("_e")
        gamma = body.ctx[:-1]
        return S.Let(
            s, _proj1(bound, cfg),
            S.MatchSum(S.Var(s),
                       binder, translate_expr(body, cfg),
                       ev, _raise_down(d.ty, gamma, ev, cfg)))
    if rule == "try":
        bound, body, handler = d.subs
        s = S.gensym("_s")
        return S.Let(
            s, _proj1(bound, cfg),
            S.MatchSum(S.Var(s),
                       d.expr.binder, translate_expr(body, cfg),
                       d.expr.exc_binder, translate_expr(handler, cfg)))
    if rule == "move":
        return translate_expr(d.subs[0], cfg)
    if rule == "match-pair":
        scrut, body = d.subs
        return S.MatchPair(translate_value(scrut, cfg),
                           d.expr.binder1, d.expr.binder2,
                           translate_expr(body, cfg))
    if rule == "match-unit":
        scrut, body = d.subs
        return S.MatchUnit(translate_value(scrut, cfg),
                           translate_expr(body, cfg))
    if rule == "match-sum":
        scrut, b1, b2 = d.subs
        return S.MatchSum(translate_value(scrut, cfg),
                          d.expr.binder1, translate_expr(b1, cfg),
                          d.expr.binder2, translate_expr(b2, cfg))
    if rule == "app":
        arg, fn = d.subs
        inner = S.App(_proj1_value(fn, cfg), translate_value(arg, cfg))
        return S.LazyPair(inner, build_drop_ctx(d.ctx))
    if rule in ("proj1", "proj2"):
        (v,) = d.subs
        inner = S.Proj(int(rule[-1]), _proj1_value(v, cfg))
        return S.LazyPair(inner, build_drop_ctx(d.ctx))
    raise _err("Untranslatable", f"expression rule {rule}")


def _proj1(d: Derivation, cfg: ExceptionConfig) -> S.Expr:
    """π1 of a translated expression, ascribed so it re-synthesizes."""
    return S.Proj(1, S.Ascribe(translate_expr(d, cfg), expr_type(d.ty, cfg)))


def _proj1_value(d: Derivation, cfg: ExceptionConfig) -> S.Expr:
    """π1 of a translated negative value (its type pos(N) = down(neg(N)))."""
    return S.Proj(1, S.Ascribe(translate_value(d, cfg),
                               translate_type(d.ty, Flavor.POS, cfg)))


### Running affine programs


def run_affine(e: S.Expr, ty: S.Type, l, fuel: int = 100000,
               amode: AffineMode = AffineMode.WITHMOVE,
               cfg: ExceptionConfig = DEFAULT_CONFIG,
               hooks=None):
    """Check, elaborate, and run an affine program.  The observable result
    type is pos(ty)+E: inl means normal return, inr an escaped exception."""
    d = check_affine((), e, ty, amode=amode, cfg=cfg)
    core = elaborate_expression(d, cfg)
    prog = S.Proj(1, S.Ascribe(core, expr_type(ty, cfg)))
    typed = T.check_core((), prog, translate_type(ty, Flavor.NEG, cfg),
                         T.Mode.LINEAR)
    return M.run(typed, tuple(l), fuel, hooks)
