import pytest

import ordlin.machine as M
import ordlin.syntax as S
from ordlin.affine import AffineMode, check_affine
from ordlin.elaborate import (Direction, Flavor, NotCentral, build_drop,
                              build_drop_ctx, build_raise, build_swap,
                              build_unwind, elaborate_expression, expr_type,
                              run_affine, translate_type)
from ordlin.generate import generate_well_typed
from ordlin.surface import parse_program, parse_type
from ordlin.typecheck import Mode, check_core

R, U = S.RES, S.UNIT


def run(term, ty, freelist, subs=()):
    for name, v in subs:
        term = S.substitute(term, name, v)
    typed = check_core((), term, ty, Mode.LINEAR, runtime=True)
    outcome, _ = M.run(typed, freelist)
    assert isinstance(outcome, M.Final), outcome
    return outcome


def test_type_translation():
    assert translate_type(R, Flavor.POS) == R
    assert translate_type(U, Flavor.NEG) == S.Sum(U, U)
    assert (translate_type(parse_type("R -o 1"), Flavor.POS)
            == parse_type("(R -o 1 + 1) & 1"))
    # central types translate to themselves
    w = parse_type("1 * (1 + 1)")
    assert translate_type(w, Flavor.POS) == w


def test_drop_releases_resources_in_order():
    d = build_drop(S.Tensor(R, R))
    out = run(S.App(d, S.Pair(S.ResLit(5), S.ResLit(9))), U, ())
    assert out == M.Final(S.UnitVal(), (5, 9))


def test_drop_on_function_uses_its_discard_component():
    a = parse_type("R -o 1")
    d = build_drop(a)
    body = S.Let("u", S.App(S.DeleteConst(), S.Var("x")),
                 S.Inj(1, S.Var("u")))
    victim = S.LazyPair(S.Lam("x", body), S.UnitVal())
    out = run(S.App(d, victim), U, ())
    assert out == M.Final(S.UnitVal(), ())


def test_drop_ctx_drops_right_to_left():
    ctx = (("x", R), ("y", R))
    out = run(build_drop_ctx(ctx), U, (),
              subs=[("x", S.ResLit(1)), ("y", S.ResLit(2))])
    assert out == M.Final(S.UnitVal(), (1, 2))


def test_swap_moves_a_central_value_across():
    sw = build_swap(R, U, Direction.FWD)
    out = run(S.App(sw, S.Pair(S.ResLit(3), S.UnitVal())),
              S.Tensor(U, R), ())
    assert out.value == S.Pair(S.UnitVal(), S.ResLit(3))


def test_swap_rejects_non_central_types():
    with pytest.raises(NotCentral):
        build_swap(U, R, Direction.FWD)
    with pytest.raises(NotCentral):
        build_swap(U, parse_type("1 -o 1"), Direction.INV)


def test_unwind_releases_the_context():
    g = (("x", R),)
    out = run(build_unwind(g), U, (),
              subs=[("x", S.ResLit(4)), ("e", S.UnitVal())])
    assert out == M.Final(S.UnitVal(), (4,))


def test_raise_at_function_type_discards_the_argument():
    a = parse_type("R -o 1")
    ty = translate_type(a, Flavor.NEG)
    raised = S.Ascribe(build_raise(a, ()), ty)
    out = run(S.App(raised, S.ResLit(1)), S.Sum(U, U), (),
              subs=[("e", S.UnitVal())])
    assert out == M.Final(S.Inj(2, S.UnitVal()), (1,))


def _affine(text):
    return parse_program(text, dialect="affine")


def test_three_allocations(corpus):
    prog = corpus["three_alloc_drop"]
    out, _ = run_affine(prog.expr, prog.ty, (0, 1, 2),
                        amode=AffineMode.NOMOVE)
    assert out == M.Final(S.Inj(1, S.UnitVal()), (0, 1, 2))
    out, _ = run_affine(prog.expr, prog.ty, (0, 1), amode=AffineMode.NOMOVE)
    assert out == M.Final(S.Inj(2, S.UnitVal()), (0, 1))


def test_handler_receives_the_exception():
    t = _affine("try x <- new () in drop x unless e -> ()")
    out, _ = run_affine(t, U, ())
    assert out == M.Final(S.Inj(1, S.UnitVal()), ())


def test_translations_check_in_both_checkers():
    t = _affine("let x = new () in drop x")
    for amode, modes in ((AffineMode.NOMOVE, (Mode.LINEAR, Mode.ORDERED)),
                         (AffineMode.WITHMOVE, (Mode.LINEAR,))):
        d = check_affine((), t, U, amode=amode)
        core = elaborate_expression(d)
        for mode in modes:
            check_core((), S.Ascribe(core, expr_type(U)), expr_type(U), mode)


def test_generated_affine_programs_elaborate(corpus):
    for seed in range(6):
        for amode in AffineMode:
            t = generate_well_typed(seed, amode, U, fuel=30)
            d = check_affine((), t, U, amode=amode)
            core = elaborate_expression(d)
            check_core((), S.Ascribe(core, expr_type(U)), expr_type(U),
                       Mode.LINEAR)
