"""Acceptance suite: one test per advertised guarantee.

Run with ``pytest -v tests/test_acceptance.py`` to get one pass/fail line
per criterion.  The expensive sweeps are shared through session fixtures:
``batch_full`` runs the bundled corpus plus generated programs with every
per-step check enabled, ``batch_det`` adds a wide determinism-only sweep.
"""

import random
import time

import pytest

import ordlin.machine as M
import ordlin.syntax as S
from ordlin.affine import AffineMode, check_affine
from ordlin.elaborate import (Direction, build_drop, build_swap,
                              elaborate_expression, expr_type, run_affine)
from ordlin.generate import generate_well_typed, sample_judgment
from ordlin.typecheck import (CheckError, Mode, check_core,
                              declarative_check)
from ordlin.verify import (ALL_CHECKS, bundled_corpus_dir, generated_programs,
                           load_corpus, verify_program)

R, U = S.RES, S.UNIT


@pytest.fixture(scope="session")
def batch_full():
    """Corpus plus generated programs, all per-step checks, freelists 0..8."""
    programs = load_corpus(bundled_corpus_dir()) + generated_programs(10)
    start = time.monotonic()
    records = [verify_program(p, max_freelist=8, checks=ALL_CHECKS)
               for p in programs]
    return records, time.monotonic() - start


@pytest.fixture(scope="session")
def batch_det():
    """A wider generated batch checked for determinism only."""
    programs = generated_programs(50)
    return [verify_program(p, max_freelist=8,
                           checks=frozenset({"determinism"}))
            for p in programs]


def test_paper_trace_replay(corpus):
    prog = corpus["two_resources"]
    typed = check_core((), prog.expr, prog.ty, Mode.ORDERED)
    start = time.monotonic()
    outcome, trace = M.run(typed, (0, 1))
    assert time.monotonic() - start < 1.0
    assert outcome == M.Final(S.UnitVal(), (0, 1))
    assert any(entry.command.freelist == ()
               and entry.command.expr == S.Inj(1, S.ResLit(1))
               for entry in trace), "expected an inl r1 state with [] free"


def test_counterexample_replay(corpus):
    prog = corpus["counterexample_p"]
    typed = check_core((), prog.expr, prog.ty, Mode.LINEAR)
    outcome, _ = M.run(typed, (0, 1))
    assert outcome == M.Final(S.UnitVal(), (1, 0))
    with pytest.raises(CheckError) as info:
        check_core((), prog.expr, prog.ty, Mode.ORDERED)
    assert info.value.code == "OrderViolation"


def test_determinism(batch_full, batch_det):
    records = batch_full[0] + batch_det
    generated = [r for r in records if r.name.startswith("gen-")]
    assert len(generated) >= 200
    bad = [r.name for r in records if not r.determinism_ok]
    assert not bad, bad


def test_subject_reduction(batch_full):
    records, elapsed = batch_full
    bad = [r.name for r in records if not r.subject_reduction_ok]
    assert not bad, bad
    assert elapsed < 60.0, f"full sweep took {elapsed:.1f}s"


def test_progress(batch_full, batch_det):
    bad = [r.name for r in batch_full[0] + batch_det if not r.progress_ok]
    assert not bad, bad


def test_resource_list_preservation(batch_full):
    bad = [r.name for r in batch_full[0] if not r.resource_list_preserved]
    assert not bad, bad


def test_ordered_freelist_identity(batch_full, batch_det):
    ordered = [r for r in batch_full[0] + batch_det if r.mode == "ordered"]
    assert ordered
    bad = [(r.name, r.final_freelist_verdict) for r in ordered
           if r.final_freelist_verdict != "Identical"]
    assert not bad, bad


def test_linear_freelist_permutation(batch_full, batch_det):
    linear = [r for r in batch_full[0] + batch_det if r.mode == "linear"]
    assert any(r.final_freelist_verdict == "Permutation" for r in linear)
    bad = [(r.name, r.final_freelist_verdict) for r in linear
           if r.final_freelist_verdict == "Violation"]
    assert not bad, bad


def test_translation_well_typedness(corpus):
    jobs = [(p.expr, p.ty, AffineMode(p.mode))
            for p in corpus.values() if p.dialect == "affine"]
    for seed in range(10):
        for amode in AffineMode:
            for ty in (U, S.Sum(U, U)):
                jobs.append((generate_well_typed(seed, amode, ty, fuel=30),
                             ty, amode))
    for expr, ty, amode in jobs:
        d = check_affine((), expr, ty, amode=amode)
        core = S.Ascribe(elaborate_expression(d), expr_type(ty))
        check_core((), core, expr_type(ty), Mode.LINEAR)
        if amode is AffineMode.NOMOVE:
            check_core((), core, expr_type(ty), Mode.ORDERED)


def test_affine_resource_safety(batch_full, batch_det, corpus):
    affine = [r for r in batch_full[0] + batch_det
              if r.mode in ("nomove", "withmove")]
    assert affine
    for r in affine:
        allowed = (("Identical",) if r.mode == "nomove"
                   else ("Identical", "Permutation"))
        assert r.final_freelist_verdict in allowed, (
            r.name, r.final_freelist_verdict)
    # a freelist of length two forces the exception path of the
    # three-allocation program and must restore the freelist exactly
    prog = corpus["three_alloc_drop"]
    out, _ = run_affine(prog.expr, prog.ty, (0, 1), amode=AffineMode.NOMOVE)
    assert out == M.Final(S.Inj(2, S.UnitVal()), (0, 1))


def _values_of(w):
    """All closed values of a central type."""
    if w == U:
        return [S.UnitVal()]
    if isinstance(w, S.Sum):
        return ([S.Inj(1, v) for v in _values_of(w.left)]
                + [S.Inj(2, v) for v in _values_of(w.right)])
    return [S.Pair(a, b)
            for a in _values_of(w.left) for b in _values_of(w.right)]


def _run_linear(term, ty, freelist=()):
    typed = check_core((), term, ty, Mode.LINEAR, runtime=True)
    outcome, _ = M.run(typed, freelist)
    assert isinstance(outcome, M.Final), outcome
    return outcome


def test_combinator_identities():
    a_cases = [(U, S.UnitVal()),
               (R, S.ResLit(3)),
               (S.Tensor(R, R), S.Pair(S.ResLit(1), S.ResLit(2))),
               (S.Sum(U, R), S.Inj(2, S.ResLit(4))),
               (S.With(U, U), S.LazyPair(S.UnitVal(), S.UnitVal()))]
    ws = [U, S.Sum(U, U), S.Tensor(U, U),
          S.Tensor(S.Sum(U, U), U), S.Sum(S.Tensor(U, U), U)]
    pairs = 0
    for a, av in a_cases:
        for w in ws:
            pairs += 1
            fwd = build_swap(a, w, Direction.FWD)
            inv = build_swap(a, w, Direction.INV)
            for wv in _values_of(w):
                term = S.Let("m", S.App(fwd, S.Pair(av, wv)),
                             S.App(inv, S.Var("m")))
                out = _run_linear(term, S.Tensor(a, w))
                assert out == M.Final(S.Pair(av, wv), ())
    assert pairs >= 20

    victim_body = S.Let("u", S.App(S.DeleteConst(), S.Var("x")),
                        S.Inj(1, S.Var("u")))
    drop_cases = [(U, S.UnitVal(), []),
                  (R, S.ResLit(3), [3]),
                  (S.Tensor(R, R), S.Pair(S.ResLit(1), S.ResLit(2)), [1, 2]),
                  (S.Sum(U, R), S.Inj(2, S.ResLit(5)), [5]),
                  (S.Sum(R, U), S.Inj(1, S.ResLit(6)), [6]),
                  (S.Tensor(S.Sum(U, R), R),
                   S.Pair(S.Inj(2, S.ResLit(7)), S.ResLit(8)), [7, 8]),
                  (S.With(U, U),
                   S.LazyPair(S.LazyPair(S.Inj(1, S.UnitVal()),
                                         S.Inj(1, S.UnitVal())),
                              S.UnitVal()), []),
                  (S.LArrow(R, U),
                   S.LazyPair(S.Lam("x", victim_body), S.UnitVal()), [])]
    for ty, value, resources in drop_cases:
        out = _run_linear(S.App(build_drop(ty), value), U)
        assert out.value == S.UnitVal()
        assert sorted(out.freelist) == sorted(resources), (ty, out)


def test_checker_oracle_equivalence():
    rng = random.Random(20240823)
    start = time.monotonic()
    for _ in range(1500):
        ctx, term, ty = sample_judgment(rng, max_size=12, max_ctx=6)
        for mode in Mode:
            try:
                check_core(ctx, term, ty, mode)
                algorithmic = True
            except CheckError:
                algorithmic = False
            declarative = declarative_check(ctx, term, ty, mode)
            assert algorithmic == declarative, (ctx, term, ty, mode)
    assert time.monotonic() - start < 120.0
