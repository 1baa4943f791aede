import pytest

import ordlin.syntax as S
from ordlin.surface import (SurfaceError, parse_program, parse_type,
                            pretty_print, pretty_print_type)


def roundtrip(text, dialect="core"):
    e = parse_program(text, dialect=dialect, desugar=False)
    again = parse_program(pretty_print(e), dialect=dialect, desugar=False)
    assert S.alpha_eq(S.desugar(e), S.desugar(again))
    return e


def test_type_roundtrip():
    for text in ["R", "1", "R * 1", "R + 1 * R", "R -o 1", "(R -o 1) + 1",
                 "1 & 1", "R * (1 + R) -o 1 & R"]:
        t = parse_type(text)
        assert parse_type(pretty_print_type(t)) == t


def test_term_roundtrip():
    roundtrip("fun x -> (x, ())")
    roundtrip("match new () { inl r -> delete r | inr i -> i }")
    roundtrip("let x = new () in match x { inl r -> delete r | inr i -> i }")
    roundtrip("snd <delete r, delete r>")
    roundtrip("(inl () : 1 + R)")


def test_affine_keywords_only_in_affine_dialect():
    roundtrip("drop x; drop y", dialect="affine")
    with pytest.raises(SurfaceError):
        parse_program("drop x", dialect="core")


def test_move_and_try_parse():
    e = parse_program("move (y, x) in drop x; drop y", dialect="affine",
                      desugar=False)
    assert isinstance(e, S.MoveIn) and (e.var1, e.var2) == ("y", "x")
    e = parse_program("try x <- new () in drop x unless e -> ()",
                      dialect="affine", desugar=False)
    assert isinstance(e, S.TryIn)
    assert (e.binder, e.exc_binder) == ("x", "e")


def test_seq_desugars_to_let_match():
    e = parse_program("delete r; ()")
    assert isinstance(e, S.Let)
    assert isinstance(e.body, S.MatchUnit)


def test_parse_errors_carry_position():
    with pytest.raises(SurfaceError) as info:
        parse_program("match x {")
    assert info.value.line == 1


def test_corpus_files_roundtrip(corpus):
    for prog in corpus.values():
        text = pretty_print(prog.expr)
        again = parse_program(text, dialect=prog.dialect)
        assert S.alpha_eq(prog.expr, again)
