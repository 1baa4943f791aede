"""Resource-tracking judgments over runtime terms.

The ordered judgment assigns a term a context Γ; L; Δ where L is an ordered
list of resource indices and Γ/Δ are the variables to the left/right of those
resources; contexts combine with a partial concatenation that fails when
resources would have to cross a variable.  The linear judgment forgets all
ordering and tracks a multiset.  Both extend to machine stacks and commands,
whose resource list/multiset is invariant under reduction for well-typed
programs; `check_preservation` tests that step by step.

`oracle_thetas` is an independent top-down exhaustive search over derivations,
used by the tests as an arbiter for the bottom-up computation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

from . import machine as M
from . import syntax as S
from .typecheck import Mode


class NotComposable(Exception):
    pass


class NotDerivable(Exception):
    pass


class LinearityViolation(Exception):
    pass


@dataclass(frozen=True)
class ResourceContext:
    """An ordered context Γ; L; Δ."""
    gamma: tuple[str, ...]
    resources: tuple[int, ...]
    delta: tuple[str, ...]

    def __str__(self) -> str:
        g = ",".join(self.gamma)
        l = ",".join(f"r{n}" for n in self.resources)
        d = ",".join(self.delta)
        return f"{g};[{l}];{d}"


@dataclass(frozen=True)
class LinearResourceContext:
    """A multiset of resources plus the set of free variables."""
    resources: tuple[int, ...]  # sorted
    vars: frozenset[str]


EMPTY = ResourceContext((), (), ())


def compose_contexts(a: ResourceContext, b: ResourceContext) -> ResourceContext:
    """The three-case partial concatenation; first applicable case wins (the
    cases agree up to the variable shifts when several apply)."""
    results = compose_all(a, b)
    if not results:
        raise NotComposable(f"{a} with {b}")
    return next(iter(sorted(results, key=_canonical_key)))


def compose_all(a: ResourceContext, b: ResourceContext) -> set[ResourceContext]:
    out = set()
    if not a.resources:
        out.add(ResourceContext(a.gamma + a.delta + b.gamma,
                                b.resources, b.delta))
    if not b.resources:
        out.add(ResourceContext(a.gamma, a.resources,
                                a.delta + b.gamma + b.delta))
    if not a.delta and not b.gamma:
        out.add(ResourceContext(a.gamma, a.resources + b.resources, b.delta))
    return out


def _decompositions(t: ResourceContext) -> set[tuple[ResourceContext,
                                                     ResourceContext]]:
    """All (a, b) with t ∈ compose_all(a, b); inverts the three cases."""
    out = set()
    g, l, d = t.gamma, t.resources, t.delta
    for i in range(len(g) + 1):
        for j in range(i, len(g) + 1):
            out.add((ResourceContext(g[:i], (), g[i:j]),
                     ResourceContext(g[j:], l, d)))
    for i in range(len(d) + 1):
        for j in range(i, len(d) + 1):
            out.add((ResourceContext(g, l, d[:i]),
                     ResourceContext(d[i:j], (), d[j:])))
    for k in range(len(l) + 1):
        out.add((ResourceContext(g, l[:k], ()),
                 ResourceContext((), l[k:], d)))
    return out


def _compose_sets(A, B) -> set[ResourceContext]:
    return {c for a in A for b in B for c in compose_all(a, b)}


def _compose3(A, B, C) -> set[ResourceContext]:
    # Union over both association orders, in case only one is defined.
    return (_compose_sets(_compose_sets(A, B), C)
            | _compose_sets(A, _compose_sets(B, C)))


def _push_delta(t: ResourceContext, *names: str) -> ResourceContext:
    return ResourceContext(t.gamma, t.resources, t.delta + names)


### Bottom-up computation of all derivable ordered contexts


def derive_ordered_all(e: S.Expr,
                       cache: Optional[dict] = None) -> frozenset[ResourceContext]:
    if cache is None:
        cache = {}
    if e in cache:
        return cache[e]
    out = _derive_all(e, cache)
    cache[e] = out
    return out


def _derive_all(e: S.Expr, cache) -> frozenset[ResourceContext]:
    D = lambda sub: derive_ordered_all(sub, cache)
    if isinstance(e, S.Var):
        return frozenset({ResourceContext((e.name,), (), ()),
                          ResourceContext((), (), (e.name,))})
    if isinstance(e, (S.UnitVal, S.NewConst, S.DeleteConst)):
        return frozenset({EMPTY})
    if isinstance(e, S.ResLit):
        return frozenset({ResourceContext((), (e.index,), ())})
    if isinstance(e, S.Ascribe):
        return D(e.expr)
    if isinstance(e, S.Inj):
        return D(e.value)
    if isinstance(e, S.Proj):
        return D(e.value)
    if isinstance(e, S.LazyPair):
        return D(e.fst) & D(e.snd)
    if isinstance(e, S.Lam):
        out = set()
        for t in D(e.body):
            if t.gamma and t.gamma[0] == e.binder:
                out.add(ResourceContext(t.gamma[1:], t.resources, t.delta))
        return frozenset(out)
    if isinstance(e, S.Pair):
        return frozenset(_compose_sets(D(e.fst), D(e.snd)))
    if isinstance(e, S.App):
        return frozenset(_compose_sets(D(e.arg), D(e.fn)))
    if isinstance(e, S.Let):
        body_ctxs = set()
        for t in D(e.body):
            if t.delta and t.delta[-1] == e.binder:
                body_ctxs.add(ResourceContext(t.gamma, t.resources,
                                              t.delta[:-1]))
        return frozenset(_compose_sets(body_ctxs, D(e.bound)))
    if isinstance(e, S.MatchPair):
        pairs = _elim_splits(D(e.body), (e.binder1, e.binder2))
        return _elim_compose(pairs, D(e.scrut))
    if isinstance(e, S.MatchUnit):
        pairs = _elim_splits(D(e.body), ())
        return _elim_compose(pairs, D(e.scrut))
    if isinstance(e, S.MatchSum):
        pairs = (_elim_splits(D(e.body1), (e.binder1,))
                 & _elim_splits(D(e.body2), (e.binder2,)))
        return _elim_compose(pairs, D(e.scrut))
    raise NotDerivable(f"no resource rule for {type(e).__name__}")


def _elim_splits(body_ctxs, binders) -> frozenset:
    """All (Θ, Θ″) such that (Θ,binders) ⋄ Θ″ derives the body."""
    out = set()
    for t in body_ctxs:
        for a, b in _decompositions(t):
            if a.delta[len(a.delta) - len(binders):] == tuple(binders) \
                    and len(a.delta) >= len(binders):
                stripped = ResourceContext(
                    a.gamma, a.resources,
                    a.delta[:len(a.delta) - len(binders)] if binders
                    else a.delta)
                out.add((stripped, b))
    return frozenset(out)


def _elim_compose(pairs, scrut_ctxs) -> frozenset[ResourceContext]:
    out = set()
    for theta, theta2 in pairs:
        out |= _compose3({theta}, scrut_ctxs, {theta2})
    return frozenset(out)


def _canonical_key(t: ResourceContext):
    return (len(t.delta), t.delta, t.gamma, t.resources)


def derive_ordered(e: S.Expr) -> ResourceContext:
    """The canonical derivable Γ; L; Δ for e (variables pushed into Γ when
    the shift rules permit)."""
    thetas = derive_ordered_all(e)
    if not thetas:
        raise NotDerivable(f"term has no ordered resource derivation")
    return min(thetas, key=_canonical_key)


### Exhaustive top-down search (test oracle)


def _o_decompositions(t):
    g, l, d = t.gamma, t.resources, t.delta
    for i in range(len(g) + 1):
        for j in range(i, len(g) + 1):
            yield (ResourceContext(g[:i], (), g[i:j]),
                   ResourceContext(g[j:], l, d))
    for i in range(len(d) + 1):
        for j in range(i, len(d) + 1):
            yield (ResourceContext(g, l, d[:i]),
                   ResourceContext(d[i:j], (), d[j:]))
    for k in range(len(l) + 1):
        yield (ResourceContext(g, l[:k], ()),
               ResourceContext((), l[k:], d))


def _o_decompositions3(t):
    for p, q in _o_decompositions(t):
        for a, b in _o_decompositions(p):
            yield a, b, q
        for b, c in _o_decompositions(q):
            yield p, b, c


def oracle_derivable(theta: ResourceContext, e: S.Expr,
                     memo: Optional[dict] = None) -> bool:
    """Decide Θ ⊢ e by direct top-down search through the derivation rules."""
    if memo is None:
        memo = {}
    key = (theta, e)
    if key in memo:
        return memo[key]
    memo[key] = False  # cycle guard; the relation is well-founded anyway
    result = _o_derivable(theta, e, memo)
    memo[key] = result
    return result


def _o_derivable(theta, e, memo) -> bool:
    rec = lambda t, sub: oracle_derivable(t, sub, memo)
    if isinstance(e, S.Var):
        return theta in (ResourceContext((e.name,), (), ()),
                         ResourceContext((), (), (e.name,)))
    if isinstance(e, (S.UnitVal, S.NewConst, S.DeleteConst)):
        return theta == EMPTY
    if isinstance(e, S.ResLit):
        return theta == ResourceContext((), (e.index,), ())
    if isinstance(e, S.Ascribe):
        return rec(theta, e.expr)
    if isinstance(e, (S.Inj, S.Proj)):
        return rec(theta, e.value)
    if isinstance(e, S.LazyPair):
        return rec(theta, e.fst) and rec(theta, e.snd)
    if isinstance(e, S.Lam):
        return rec(ResourceContext((e.binder,) + theta.gamma,
                                   theta.resources, theta.delta), e.body)
    if isinstance(e, S.Pair):
        return any(rec(a, e.fst) and rec(b, e.snd)
                   for a, b in _o_decompositions(theta))
    if isinstance(e, S.App):
        return any(rec(a, e.arg) and rec(b, e.fn)
                   for a, b in _o_decompositions(theta))
    if isinstance(e, S.Let):
        return any(rec(_push_delta(a, e.binder), e.body) and rec(b, e.bound)
                   for a, b in _o_decompositions(theta))
    if isinstance(e, S.MatchPair):
        for a, b, c in _o_decompositions3(theta):
            pre = compose_all(_push_delta(a, e.binder1, e.binder2), c)
            if rec(b, e.scrut) and any(rec(p, e.body) for p in pre):
                return True
        return False
    if isinstance(e, S.MatchUnit):
        for a, b, c in _o_decompositions3(theta):
            pre = compose_all(a, c)
            if rec(b, e.scrut) and any(rec(p, e.body) for p in pre):
                return True
        return False
    if isinstance(e, S.MatchSum):
        for a, b, c in _o_decompositions3(theta):
            pre1 = compose_all(_push_delta(a, e.binder1), c)
            pre2 = compose_all(_push_delta(a, e.binder2), c)
            if (rec(b, e.scrut)
                    and any(rec(p, e.body1) for p in pre1)
                    and any(rec(p, e.body2) for p in pre2)):
                return True
        return False
    return False


def oracle_thetas(e: S.Expr) -> frozenset[ResourceContext]:
    """All derivable contexts, found by testing every candidate context built
    from permutations of e's variables and resource literals."""
    fv = sorted(S.free_vars(e))
    lits = sorted(x.index for x in S.subexpressions(e)
                  if isinstance(x, S.ResLit))
    memo: dict = {}
    out = set()
    for var_perm in set(itertools.permutations(fv)):
        for lit_perm in set(itertools.permutations(lits)):
            for i in range(len(var_perm) + 1):
                cand = ResourceContext(var_perm[:i], tuple(lit_perm),
                                       var_perm[i:])
                if oracle_derivable(cand, e, memo):
                    out.add(cand)
    return frozenset(out)


### Linear judgment (order forgotten)


def derive_linear(e: S.Expr) -> LinearResourceContext:
    ms, vs = _linear(e)
    return LinearResourceContext(tuple(sorted(ms)), frozenset(vs))


def _l_union(a, b):
    ms = a[0] + b[0]
    if a[1] & b[1]:
        raise LinearityViolation(
            f"variables {sorted(a[1] & b[1])} used more than once")
    return ms, a[1] | b[1]


def _l_bind(pair, *names):
    ms, vs = pair
    for n in names:
        if n not in vs:
            raise LinearityViolation(f"variable {n} is never used")
    return ms, vs - set(names)


def _linear(e: S.Expr) -> tuple[tuple[int, ...], frozenset[str]]:
    if isinstance(e, S.Var):
        return (), frozenset({e.name})
    if isinstance(e, (S.UnitVal, S.NewConst, S.DeleteConst)):
        return (), frozenset()
    if isinstance(e, S.ResLit):
        return (e.index,), frozenset()
    if isinstance(e, S.Ascribe):
        return _linear(e.expr)
    if isinstance(e, (S.Inj, S.Proj)):
        return _linear(e.value)
    if isinstance(e, S.LazyPair):
        a, b = _linear(e.fst), _linear(e.snd)
        if a != b:
            raise LinearityViolation(
                "lazy pair components disagree on resources or variables")
        return a
    if isinstance(e, S.Lam):
        return _l_bind(_linear(e.body), e.binder)
    if isinstance(e, S.Pair):
        return _l_union(_linear(e.fst), _linear(e.snd))
    if isinstance(e, S.App):
        return _l_union(_linear(e.arg), _linear(e.fn))
    if isinstance(e, S.Let):
        return _l_union(_l_bind(_linear(e.body), e.binder), _linear(e.bound))
    if isinstance(e, S.MatchPair):
        body = _l_bind(_linear(e.body), e.binder1, e.binder2)
        return _l_union(body, _linear(e.scrut))
    if isinstance(e, S.MatchUnit):
        return _l_union(_linear(e.body), _linear(e.scrut))
    if isinstance(e, S.MatchSum):
        b1 = _l_bind(_linear(e.body1), e.binder1)
        b2 = _l_bind(_linear(e.body2), e.binder2)
        if (tuple(sorted(b1[0])), b1[1]) != (tuple(sorted(b2[0])), b2[1]):
            raise LinearityViolation("sum branches disagree on resources")
        return _l_union(b1, _linear(e.scrut))
    raise LinearityViolation(f"no resource rule for {type(e).__name__}")


### Stacks and commands


def _closed_list(e: S.Expr, cache) -> tuple[int, ...]:
    """L with ;L; ⊢ e for a closed term."""
    ls = {t.resources for t in derive_ordered_all(e, cache)
          if not t.gamma and not t.delta}
    if len(ls) != 1:
        raise NotDerivable(
            "no unique ordered resource list for a closed term")
    return next(iter(ls))


def _kont_list(binder: str, body: S.Expr, cache) -> tuple[int, ...]:
    """L with ;L;x ⊢ body for a continuation frame."""
    ls = {t.resources for t in derive_ordered_all(body, cache)
          if not t.gamma and t.delta == (binder,)}
    if len(ls) != 1:
        raise NotDerivable(
            "no unique ordered resource list for a continuation body")
    return next(iter(ls))


def command_resources(c: M.Command, mode: Mode,
                      cache: Optional[dict] = None):
    """The invariant quantity of a machine state: L_s ++ L_t ++ l as an
    ordered list, or the union multiset in Linear mode.

    A caller iterating over a whole trace can pass one cache dict to share
    per-term derivations across states."""
    if mode is Mode.ORDERED:
        if cache is None:
            cache = {}
        acc: tuple[int, ...] = ()
        for frame in reversed(c.stack):  # bottom (deepest) first
            if isinstance(frame, M.ArgFrame):
                acc = acc + _closed_list(frame.value, cache)
            elif isinstance(frame, M.KontFrame):
                acc = acc + _kont_list(frame.binder, frame.body, cache)
            # projection frames carry no resources
        return acc + _closed_list(c.expr, cache) + tuple(c.freelist)
    counts: list[int] = []
    for frame in c.stack:
        if isinstance(frame, M.ArgFrame):
            counts.extend(derive_linear(frame.value).resources)
        elif isinstance(frame, M.KontFrame):
            lk = derive_linear(frame.body)
            if lk.vars - {frame.binder}:
                raise LinearityViolation("open continuation body")
            counts.extend(lk.resources)
    le = derive_linear(c.expr)
    if le.vars:
        raise LinearityViolation("open command expression")
    counts.extend(le.resources)
    counts.extend(c.freelist)
    return tuple(sorted(counts))


def check_preservation(before: M.Command, after: M.Command, mode: Mode) -> bool:
    return command_resources(before, mode) == command_resources(after, mode)
