"""Seeded generation of programs for the verification harness.

`generate_well_typed` composes closed allocation/release gadgets
type-directedly and validates every candidate with the real checker before
returning it, so an accepted term is never silently ill-typed.  `sample_term`
produces arbitrary small terms, mostly ill-typed, for cross-checking the
algorithmic checker against declarative derivation search.
"""

from __future__ import annotations

import random
from typing import Union

from . import syntax as S
from .affine import AffineMode, check_affine
from .typecheck import CheckError, Mode, check_core


class GenerationExhausted(Exception):
    pass


GenMode = Union[Mode, AffineMode]


def generate_well_typed(seed: int, mode: GenMode, target: S.Type,
                        fuel: int = 50) -> S.Expr:
    """A closed term accepted at `target` by the checker for `mode`.

    Deterministic per seed.  fuel bounds both the retry count and the
    nesting depth of the generated term.
    """
    rng = random.Random(seed)
    if fuel <= 0:
        candidate = _trivial(target)
        if candidate is not None and _accepts(mode, candidate, target):
            return candidate
        raise GenerationExhausted(f"no trivial program of type {target}")
    depth = min(4, 1 + fuel // 10)
    for _ in range(max(1, fuel)):
        affine = isinstance(mode, AffineMode)
        gen = _AffineGen(rng, mode) if affine else _CoreGen(rng)
        try:
            t = gen.expr(target, depth)
        except _Restart:
            continue
        if _accepts(mode, t, target):
            return t
    raise GenerationExhausted(f"no program of type {target} within {fuel} tries")


def _trivial(target: S.Type):
    if isinstance(target, S.Unit):
        return S.UnitVal()
    if isinstance(target, S.Tensor):
        fst, snd = _trivial(target.left), _trivial(target.right)
        return S.Pair(fst, snd) if fst is not None and snd is not None else None
    if isinstance(target, S.Sum):
        left = _trivial(target.left)
        if left is not None:
            return S.Inj(1, left)
        right = _trivial(target.right)
        return S.Inj(2, right) if right is not None else None
    return None


def _accepts(mode: GenMode, t: S.Expr, target: S.Type) -> bool:
    try:
        if isinstance(mode, AffineMode):
            check_affine((), t, target, amode=mode)
        else:
            check_core((), t, target, mode)
        return True
    except CheckError:
        return False


class _Restart(Exception):
    pass


def _seq(first: S.Expr, rest: S.Expr) -> S.Expr:
    z = S.gensym("_g")
    return S.Let(z, S.Ascribe(first, S.UNIT),
                 S.MatchUnit(S.Var(z), rest))


class _CoreGen:
    """Closed core terms built from intro forms plus New/Delete gadgets."""

    def __init__(self, rng: random.Random):
        self.rng = rng

    def expr(self, ty: S.Type, depth: int) -> S.Expr:
        if depth <= 0:
            return self.value(ty, 0)
        roll = self.rng.random()
        if roll < 0.45:
            return self.gadget(ty, depth)
        if roll < 0.6:
            return _seq(self.gadget(S.UNIT, depth - 1),
                        self.expr(ty, depth - 1))
        return self.value(ty, depth)

    def gadget(self, ty: S.Type, depth: int) -> S.Expr:
        """An allocation that is always released before producing ty."""
        x, r, i = S.gensym("_x"), S.gensym("_r"), S.gensym("_i")
        rest = self.expr(ty, depth - 1)
        use = _seq(S.App(S.DeleteConst(), S.Var(r)), rest)
        spare = S.MatchUnit(S.Var(i), self.expr(ty, depth - 1))
        return S.Let(x, S.App(S.NewConst(), S.UnitVal()),
                     S.MatchSum(S.Var(x), r, use, i, spare))

    def value(self, ty: S.Type, depth: int) -> S.Expr:
        if isinstance(ty, S.Unit):
            return S.UnitVal()
        if isinstance(ty, S.Tensor):
            return S.Pair(self.value(ty.left, depth),
                          self.value(ty.right, depth))
        if isinstance(ty, S.Sum):
            tag = self.rng.choice((1, 2))
            part = ty.left if tag == 1 else ty.right
            return S.Inj(tag, self.value(part, depth))
        if isinstance(ty, S.LArrow):
            v = S.gensym("_v")
            return S.Lam(v, self.consume(v, ty.domain, ty.codomain, depth),
                         binder_ty=ty.domain)
        if isinstance(ty, S.With):
            return S.LazyPair(self.expr(ty.left, depth),
                              self.expr(ty.right, depth))
        raise _Restart

    def consume(self, name: str, a: S.Type, ty: S.Type, depth: int) -> S.Expr:
        """An expression of type ty whose sole free variable is name : a."""
        if isinstance(a, S.Unit):
            return S.MatchUnit(S.Var(name), self.expr(ty, depth))
        if isinstance(a, S.Res):
            return _seq(S.App(S.DeleteConst(), S.Var(name)),
                        self.expr(ty, depth))
        if isinstance(a, S.Tensor):
            l, r = S.gensym("_v"), S.gensym("_v")
            inner = self.consume(r, a.right, ty, depth)
            return S.MatchPair(S.Var(name), l, r,
                               _wrap_consume(self, l, a.left, inner, ty,
                                             depth))
        if isinstance(a, S.Sum):
            l, r = S.gensym("_v"), S.gensym("_v")
            return S.MatchSum(S.Var(name),
                              l, self.consume(l, a.left, ty, depth),
                              r, self.consume(r, a.right, ty, depth))
        raise _Restart


def _wrap_consume(gen: _CoreGen, name: str, a: S.Type, inner: S.Expr,
                  ty: S.Type, depth: int) -> S.Expr:
    """Consume name : a before running inner (which already produces ty)."""
    if isinstance(a, S.Unit):
        return S.MatchUnit(S.Var(name), inner)
    if isinstance(a, S.Res):
        return _seq(S.App(S.DeleteConst(), S.Var(name)), inner)
    raise _Restart


class _AffineGen:
    """Closed affine terms biased toward new/drop/raise/try/move."""

    def __init__(self, rng: random.Random, amode: AffineMode):
        self.rng = rng
        self.amode = amode

    def expr(self, ty: S.Type, depth: int) -> S.Expr:
        if depth <= 0:
            return self.value(ty, 0)
        roll = self.rng.random()
        if roll < 0.3:
            return self.alloc_gadget(ty, depth)
        if roll < 0.45:
            return self.try_gadget(ty, depth)
        if roll < 0.55 and self.amode is AffineMode.WITHMOVE:
            return self.move_gadget(ty, depth)
        if roll < 0.7:
            return _seq(self.alloc_gadget(S.UNIT, depth - 1),
                        self.expr(ty, depth - 1))
        return self.value(ty, depth)

    def alloc_gadget(self, ty: S.Type, depth: int) -> S.Expr:
        x = S.gensym("_x")
        rest = self.expr(ty, depth - 1)
        return S.Let(x, S.App(S.NewConst(), S.UnitVal()),
                     _seq(S.App(S.DropConst(), S.Var(x)), rest))

    def try_gadget(self, ty: S.Type, depth: int) -> S.Expr:
        x, e = S.gensym("_x"), S.gensym("_e")
        body = _seq(S.App(S.DropConst(), S.Var(x)), self.expr(ty, depth - 1))
        handler = S.MatchUnit(S.Var(e), self.expr(ty, depth - 1))
        return S.TryIn(x, S.App(S.NewConst(), S.UnitVal()), body, e, handler)

    def move_gadget(self, ty: S.Type, depth: int) -> S.Expr:
        x, y = S.gensym("_x"), S.gensym("_y")
        rest = _seq(S.App(S.DropConst(), S.Var(x)),
                    _seq(S.App(S.DropConst(), S.Var(y)),
                         self.expr(ty, depth - 1)))
        return S.Let(x, S.App(S.NewConst(), S.UnitVal()),
                     S.Let(y, S.App(S.NewConst(), S.UnitVal()),
                           S.MoveIn(y, x, rest)))

    def value(self, ty: S.Type, depth: int) -> S.Expr:
        if isinstance(ty, S.Unit):
            return S.UnitVal()
        if isinstance(ty, S.Tensor):
            return S.Pair(self.value(ty.left, depth),
                          self.value(ty.right, depth))
        if isinstance(ty, S.Sum):
            tag = self.rng.choice((1, 2))
            part = ty.left if tag == 1 else ty.right
            return S.Inj(tag, self.value(part, depth))
        if isinstance(ty, S.LArrow):
            v = S.gensym("_v")
            body = _seq(S.App(S.DropConst(), S.Var(v)),
                        self.expr(ty.codomain, max(0, depth - 1)))
            return S.Lam(v, body, binder_ty=ty.domain)
        if isinstance(ty, S.With):
            return S.LazyPair(self.expr(ty.left, depth),
                              self.expr(ty.right, depth))
        raise _Restart


### Arbitrary small terms and types (not validity-biased)


_BASE_TYPES = (S.RES, S.UNIT)


def sample_type(rng: random.Random, depth: int = 2) -> S.Type:
    if depth <= 0 or rng.random() < 0.4:
        return rng.choice(_BASE_TYPES)
    shape = rng.randrange(4)
    l = sample_type(rng, depth - 1)
    r = sample_type(rng, depth - 1)
    if shape == 0:
        return S.Tensor(l, r)
    if shape == 1:
        return S.Sum(l, r)
    if shape == 2:
        return S.LArrow(l, r)
    return S.With(l, r)


def sample_term(rng: random.Random, ctx_names: list[str],
                size: int) -> S.Expr:
    """A random term of at most `size` nodes over the given variables.

    Most samples are ill-typed; they exercise the rejection paths of both
    checkers equally.
    """
    if size <= 1 or rng.random() < 0.3:
        if ctx_names and rng.random() < 0.8:
            return S.Var(rng.choice(ctx_names))
        return rng.choice((S.UnitVal(), S.NewConst(), S.DeleteConst()))
    shape = rng.randrange(10)
    half = max(1, (size - 1) // 2)
    if shape == 0:
        return S.Pair(sample_term(rng, ctx_names, half),
                      sample_term(rng, ctx_names, half))
    if shape == 1:
        return S.Inj(rng.choice((1, 2)), sample_term(rng, ctx_names, half))
    if shape == 2:
        x = f"v{rng.randrange(3)}"
        return S.Lam(x, sample_term(rng, ctx_names + [x], size - 1),
                     binder_ty=sample_type(rng, 1))
    if shape == 3:
        return S.LazyPair(sample_term(rng, ctx_names, half),
                          sample_term(rng, ctx_names, half))
    if shape == 4:
        x = f"v{rng.randrange(3)}"
        return S.Let(x, sample_term(rng, ctx_names, half),
                     sample_term(rng, ctx_names + [x], half))
    if shape == 5:
        x, y = f"v{rng.randrange(3)}", f"w{rng.randrange(3)}"
        return S.MatchPair(sample_term(rng, ctx_names, half), x, y,
                           sample_term(rng, ctx_names + [x, y], half))
    if shape == 6:
        return S.MatchUnit(sample_term(rng, ctx_names, half),
                           sample_term(rng, ctx_names, half))
    if shape == 7:
        x, y = f"v{rng.randrange(3)}", f"w{rng.randrange(3)}"
        third = max(1, (size - 1) // 3)
        return S.MatchSum(sample_term(rng, ctx_names, third),
                          x, sample_term(rng, ctx_names + [x], third),
                          y, sample_term(rng, ctx_names + [y], third))
    if shape == 8:
        return S.App(sample_term(rng, ctx_names, half),
                     sample_term(rng, ctx_names, half))
    if rng.random() < 0.5:
        return S.Proj(rng.choice((1, 2)), sample_term(rng, ctx_names, size - 1))
    return S.Ascribe(sample_term(rng, ctx_names, size - 1),
                     sample_type(rng, 1))


def sample_judgment(rng: random.Random, max_size: int = 12,
                    max_ctx: int = 6) -> tuple[tuple, S.Expr, S.Type]:
    """A random (context, term, type) triple for checker cross-validation."""
    n = rng.randrange(max_ctx + 1)
    ctx = tuple((f"v{i}", sample_type(rng, 1)) for i in range(n))
    term = sample_term(rng, [name for name, _ in ctx],
                       rng.randrange(1, max_size + 1))
    return ctx, term, sample_type(rng, 2)
