import pytest

import ordlin.syntax as S
from ordlin.affine import (AffineMode, DEFAULT_CONFIG, ExceptionConfig,
                           check_affine, synthesize_affine)
from ordlin.surface import parse_program, parse_type
from ordlin.typecheck import CheckError

R, U = S.RES, S.UNIT


def check(text, ty, amode=AffineMode.WITHMOVE, cfg=DEFAULT_CONFIG):
    return check_affine((), parse_program(text, dialect="affine"),
                        parse_type(ty), amode=amode, cfg=cfg)


def rejects(text, ty, code, amode=AffineMode.WITHMOVE):
    with pytest.raises(CheckError) as info:
        check(text, ty, amode)
    assert info.value.code == code


def test_new_is_total_and_delete_is_gone():
    check("fun u -> new u", "1 -o R")
    rejects("fun r -> delete r", "R -o 1", "DeleteForbidden")


def test_drop_at_any_type():
    check("fun r -> drop r", "R -o 1")
    check("fun p -> drop p", "R * R -o 1")
    check("fun f -> drop f", "(R -o 1) -o 1")


def test_raise_inhabits_any_result():
    check("fun e -> raise e", "1 -o R")
    check("fun e -> raise e", "1 -o R * (1 + R)")


def test_move_permutes_adjacent_variables():
    text = ("let x = new () in let y = new () in "
            "move (y, x) in drop x; drop y")
    check(text, "1")
    rejects(text, "1", "MoveForbidden", AffineMode.NOMOVE)
    # move only swaps adjacent entries
    bad = ("let x = new () in let y = new () in let z = new () in "
           "move (z, x) in drop x; drop y; drop z")
    rejects(bad, "1", "OrderViolation")


def test_try_binds_positive_results_only():
    d = check("try x <- new () in drop x unless e -> ()", "1")
    assert d.rule == "try"
    rejects("try f <- (fun u -> u : 1 -o 1) in f () unless e -> ()",
            "1", "TryOnNegative")


def test_unused_let_and_try_binders_get_dropped():
    d = check("let x = new () in ()", "1")
    assert d.rule == "let"
    body = d.subs[1]
    # the inserted drop shows up as an application in the body derivation
    assert body.rule == "let" and body.subs[0].rule == "app"


def test_lambda_binders_still_must_be_used():
    rejects("fun r -> ()", "R -o 1", "UnusedVariable")


def test_ordered_discipline_still_applies():
    rejects("fun x -> fun y -> (x, y)", "R -o (R -o R * R)", "OrderViolation",
            AffineMode.NOMOVE)
    check("fun x -> fun y -> (y, x)", "R -o (R -o R * R)", AffineMode.NOMOVE)


def test_exception_config_must_be_central():
    with pytest.raises(CheckError) as info:
        ExceptionConfig(S.LArrow(R, U), S.UnitVal()).validate()
    assert info.value.code == "NotCentral"
    cfg = ExceptionConfig(S.Sum(U, U), S.Inj(2, S.UnitVal()))
    cfg.validate()
    check("fun e -> raise e", "1 + 1 -o R", cfg=cfg)


def test_synthesize_affine():
    d = synthesize_affine((("r", R),),
                          parse_program("drop r", dialect="affine"),
                          amode=AffineMode.NOMOVE)
    assert d.ty == U
