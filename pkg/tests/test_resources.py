import pytest

import ordlin.machine as M
import ordlin.resources as R
import ordlin.syntax as S
from ordlin.surface import parse_program
from ordlin.typecheck import Mode, check_core

U = S.UNIT


def test_values_collect_their_resources():
    assert R.derive_ordered(S.ResLit(7)) == R.ResourceContext((), (7,), ())
    assert R.derive_ordered(S.Pair(S.ResLit(1), S.ResLit(2))).resources == (1, 2)
    assert R.derive_ordered(S.UnitVal()).resources == ()


def test_variable_admits_both_shifts():
    thetas = R.derive_ordered_all(S.Var("x"))
    assert R.ResourceContext(("x",), (), ()) in thetas
    assert R.ResourceContext((), (), ("x",)) in thetas


def test_composition_cases():
    a = R.ResourceContext(("x",), (), ())
    b = R.ResourceContext((), (3,), ())
    combined = R.compose_all(a, b)
    assert R.ResourceContext(("x",), (3,), ()) in combined
    with pytest.raises(R.NotComposable):
        R.compose_contexts(R.ResourceContext((), (1,), ("x",)),
                           R.ResourceContext((), (2,), ("y",)))


def test_closed_typed_term_has_empty_list():
    t = check_core((), parse_program("fun x -> delete x"),
                   S.LArrow(S.RES, U), Mode.ORDERED)
    assert R.derive_ordered(t) == R.ResourceContext((), (), ())


def test_ordered_oracle_agrees():
    for text in ["fun x -> delete x",
                 "match new () { inl r -> delete r | inr i -> i }",
                 "fun x -> fun y -> (y, x)"]:
        e = parse_program(text)
        derived = R.derive_ordered_all(e)
        assert derived == R.oracle_thetas(e), text


def test_command_resources_count_stack_and_freelist():
    c = M.Command(S.DeleteConst(),
                  (M.ArgFrame(S.ResLit(7, ty=S.RES), S.Polarity.POS),),
                  (2,), S.Polarity.NEG)
    assert R.command_resources(c, Mode.ORDERED) == (7, 2)
    assert R.command_resources(c, Mode.LINEAR) == (2, 7)


def _trace(prog, freelist, mode):
    typed = check_core((), prog.expr, prog.ty, mode)
    outcome, trace = M.run(typed, freelist)
    assert isinstance(outcome, M.Final)
    return trace


def test_ordered_list_constant_through_a_run(corpus):
    trace = _trace(corpus["two_resources"], (0, 1), Mode.ORDERED)
    lists = {R.command_resources(e.command, Mode.ORDERED) for e in trace}
    assert lists == {(0, 1)}


def test_linear_multiset_constant_where_ordered_fails(corpus):
    trace = _trace(corpus["counterexample_p"], (0, 1), Mode.LINEAR)
    multisets = {R.command_resources(e.command, Mode.LINEAR) for e in trace}
    assert multisets == {(0, 1)}
    failures = 0
    for entry in trace:
        try:
            R.command_resources(entry.command, Mode.ORDERED)
        except R.NotDerivable:
            failures += 1
    assert failures > 0, "the permuting program should break the ordered list"


def test_linear_judgment_flags_violations():
    with pytest.raises(R.LinearityViolation):
        R.derive_linear(S.Pair(S.Var("x"), S.Var("x")))
    with pytest.raises(R.LinearityViolation):
        R.derive_linear(S.Lam("x", S.UnitVal()))


def test_preservation_helper(corpus):
    trace = _trace(corpus["two_resources"], (0, 1), Mode.ORDERED)
    for before, after in zip(trace, trace[1:]):
        assert R.check_preservation(before.command, after.command,
                                    Mode.ORDERED)
