import random

import pytest

import ordlin.syntax as S
from ordlin.affine import AffineMode, check_affine
from ordlin.generate import (GenerationExhausted, generate_well_typed,
                             sample_judgment, sample_term, sample_type)
from ordlin.surface import parse_type
from ordlin.typecheck import Mode, check_core

U = S.UNIT


def test_zero_fuel_yields_the_trivial_inhabitant():
    for mode in (Mode.ORDERED, Mode.LINEAR, AffineMode.NOMOVE):
        assert generate_well_typed(0, mode, U, fuel=0) == S.UnitVal()


def test_zero_fuel_fails_on_uninhabited_base():
    with pytest.raises(GenerationExhausted):
        generate_well_typed(0, Mode.ORDERED, S.RES, fuel=0)


def test_deterministic_per_seed():
    for mode in (Mode.ORDERED, AffineMode.WITHMOVE):
        a = generate_well_typed(3, mode, U, fuel=25)
        b = generate_well_typed(3, mode, U, fuel=25)
        assert S.alpha_eq(a, b)


def test_generated_terms_pass_their_checker():
    target = parse_type("1 * (1 + 1)")
    for seed in range(8):
        t = generate_well_typed(seed, Mode.ORDERED, target, fuel=30)
        check_core((), t, target, Mode.ORDERED)
        t = generate_well_typed(seed, Mode.LINEAR, target, fuel=30)
        check_core((), t, target, Mode.LINEAR)
        t = generate_well_typed(seed, AffineMode.WITHMOVE, target, fuel=30)
        check_affine((), t, target, amode=AffineMode.WITHMOVE)


def test_alloc_bias():
    uses_new = sum(
        any(isinstance(s, S.NewConst) for s in
            S.subexpressions(generate_well_typed(seed, Mode.ORDERED, U,
                                                 fuel=30)))
        for seed in range(20))
    assert uses_new >= 10


def test_sampler_bounds():
    rng = random.Random(0)
    for _ in range(200):
        ctx, term, ty = sample_judgment(rng, max_size=12, max_ctx=6)
        assert len(ctx) <= 6
        assert S.size(term) <= 3 * 12  # size is a node budget, not exact
        assert isinstance(ty, S.Type)


def test_sample_term_covers_all_shapes():
    rng = random.Random(1)
    seen = set()
    for _ in range(400):
        t = sample_term(rng, ["v0"], 10)
        seen.update(type(s).__name__ for s in S.subexpressions(t))
    assert {"Lam", "Pair", "LazyPair", "Let", "MatchSum", "App",
            "Proj"} <= seen


def test_sample_type_closes_over_connectives():
    rng = random.Random(2)
    names = {type(sample_type(rng, 3)).__name__ for _ in range(100)}
    assert {"Tensor", "Sum", "LArrow", "With"} & names
