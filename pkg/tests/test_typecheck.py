import random

import pytest

import ordlin.syntax as S
from ordlin.generate import sample_judgment
from ordlin.surface import parse_program, parse_type
from ordlin.typecheck import (CheckError, Mode, check_core, declarative_check,
                              synthesize_value)

R, U = S.RES, S.UNIT


def check(text, ty, mode=Mode.ORDERED, ctx=()):
    return check_core(ctx, parse_program(text), parse_type(ty), mode)


def rejects(text, ty, code, mode=Mode.ORDERED, ctx=()):
    with pytest.raises(CheckError) as info:
        check(text, ty, mode, ctx)
    assert info.value.code == code


def test_identity_and_pairing():
    check("fun x -> x", "R -o R")
    check("fun x -> fun y -> (y, x)", "R -o (R -o R * R)")
    check("fun x -> fun y -> (y, x)", "R -o (R -o R * R)", Mode.LINEAR)


def test_argument_order_is_ordered():
    # (x, y) consumes the context in the wrong order for O but is fine in L
    rejects("fun x -> fun y -> (x, y)", "R -o (R -o R * R)", "OrderViolation")
    check("fun x -> fun y -> (x, y)", "R -o (R -o R * R)", Mode.LINEAR)


def test_linearity_violations():
    rejects("fun x -> (x, x)", "R -o R * R", "DuplicateUse", Mode.LINEAR)
    rejects("fun x -> ()", "R -o 1", "UnusedVariable", Mode.LINEAR)
    rejects("fun x -> (y, x)", "R -o R * R", "UnboundVariable", Mode.LINEAR)


def test_lazy_pair_shares_context():
    check("fun r -> <delete r, delete r>", "R -o 1 & 1")
    rejects("fun r -> <delete r, ()>", "R -o 1 & 1", "UnusedVariable")


def test_new_delete_types():
    check("new", "1 -o R + 1")
    check("delete", "R -o 1")
    rejects("new", "1 -o R", "TypeMismatch")


def test_injection_needs_annotation():
    rejects("fun x -> let y = inl x in y", "R -o R + 1", "AnnotationRequired")
    check("fun x -> let y = (inl x : R + 1) in y", "R -o R + 1")


def test_value_restriction_on_match_scrutinee():
    # a raw eliminator whose scrutinee is an application, without the
    # desugaring pass that would have lifted it into a let
    raw = S.Lam("f", S.MatchSum(S.App(S.Var("f"), S.UnitVal()),
                                "r", S.App(S.DeleteConst(), S.Var("r")),
                                "i", S.Var("i")))
    with pytest.raises(CheckError) as info:
        check_core((), raw, parse_type("(1 -o R + 1) -o 1"), Mode.ORDERED)
    assert info.value.code == "PolarityMismatch"
    # the surface pipeline inserts the lift automatically
    check("fun f -> match f () { inl r -> delete r | inr i -> i }",
          "(1 -o R + 1) -o 1")


def test_synthesize_value():
    ty, _ = synthesize_value((("x", R),), S.Var("x"), Mode.ORDERED)
    assert ty == R
    ty, _ = synthesize_value((), parse_program("(fun x -> delete x : R -o 1)"),
                             Mode.ORDERED)
    assert ty == S.LArrow(R, U)


def test_reslit_rejected_outside_runtime():
    with pytest.raises(CheckError):
        check_core((), S.ResLit(3), R, Mode.ORDERED)
    check_core((), S.ResLit(3), R, Mode.ORDERED, runtime=True)


def test_declarative_oracle_agrees_on_small_judgments():
    rng = random.Random(11)
    for _ in range(150):
        ctx, term, ty = sample_judgment(rng, max_size=7, max_ctx=3)
        for mode in Mode:
            try:
                check_core(ctx, term, ty, mode)
                algorithmic = True
            except CheckError:
                algorithmic = False
            assert declarative_check(ctx, term, ty, mode) == algorithmic, (
                ctx, term, ty, mode)
