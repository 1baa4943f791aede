import json

import ordlin.machine as M
import ordlin.syntax as S
from ordlin.surface import parse_program, pretty_print
from ordlin.typecheck import Mode, check_core

U = S.UNIT


def run_text(text, freelist, ty=U, mode=Mode.ORDERED):
    typed = check_core((), parse_program(text), ty, mode)
    return M.run(typed, freelist)


def test_two_resources_trace(corpus):
    """The allocate-two-free-two program touches the empty freelist midway
    and ends with the freelist exactly as it started."""
    typed = check_core((), corpus["two_resources"].expr, U, Mode.ORDERED)
    outcome, trace = M.run(typed, (0, 1))
    assert outcome == M.Final(S.UnitVal(), (0, 1))
    intermediate = [e for e in trace
                    if e.command.expr == S.Inj(1, S.ResLit(1))
                    and e.command.freelist == ()]
    assert intermediate, "expected a state returning r1 with an empty freelist"
    assert any(isinstance(f, M.KontFrame)
               for f in intermediate[0].command.stack)


def test_new_rules():
    out, _ = run_text("match new () { inl r -> delete r | inr i -> i }", (5,))
    assert out == M.Final(S.UnitVal(), (5,))
    out, _ = run_text("match new () { inl r -> delete r | inr i -> i }", ())
    assert out == M.Final(S.UnitVal(), ())


def test_delete_pushes_front():
    out, _ = run_text(
        "match new () { inl r -> delete r | inr i -> i }", (7, 2))
    assert out.freelist == (7, 2)
    # allocate both, free in allocation order is impossible in O; free
    # innermost-first keeps the order
    text = ("match new () { inl r -> match new () { inl s -> "
            "delete s; delete r | inr i -> i; delete r } | inr i -> i }")
    out, _ = run_text(text, (7, 2))
    assert out.freelist == (7, 2)


def test_each_step_fires_exactly_one_rule():
    _, trace = run_text(
        "match new () { inl r -> snd <delete r, delete r> | inr i -> i }",
        (3,))
    for entry in trace:
        cls = M.classify(entry.command)
        if entry.rule is None:
            assert cls == set()
        else:
            assert cls == {entry.rule}


def test_lazy_pair_projection_and_application():
    out, _ = run_text("(fun x -> fst <x, x> : 1 -o 1) ()", (), ty=U)
    assert out == M.Final(S.UnitVal(), ())


def test_stuck_is_reported_not_crashed():
    # an open command is refused up front
    try:
        M.load(S.Var("x"), S.Polarity.POS, ())
        assert False
    except M.OpenTerm:
        pass


def test_fuel_exhaustion():
    typed = check_core((), parse_program("()"), U, Mode.ORDERED)
    outcome, trace = M.run(typed, (), fuel=0)
    assert isinstance(outcome, M.FuelExhausted)


def test_trace_json_schema(tmp_path):
    _, trace = run_text("match new () { inl r -> delete r | inr i -> i }",
                        (4,))
    path = tmp_path / "trace.json"
    M.write_trace(trace, path)
    entries = json.loads(path.read_text())
    assert [e["step"] for e in entries] == list(range(len(entries)))
    for e in entries:
        assert set(e) == {"step", "polarity", "expr", "stack", "freelist",
                          "rule"}
    assert entries[-1]["rule"] is None
    assert entries[-1]["freelist"] == [4]


def test_hooks_observe_every_step():
    seen = []
    typed = check_core(
        (), parse_program("match new () { inl r -> delete r | inr i -> i }"),
        U, Mode.ORDERED)
    M.run(typed, (1,), hooks=[lambda i, c, r: seen.append((i, r))])
    assert [i for i, _ in seen] == list(range(len(seen)))
    assert seen[-1][1] is None  # final state fires no rule
