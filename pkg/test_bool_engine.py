import itertools

import numpy as np
import pytest

from bool_engine import BoolEngine, VarKind
from corpus import _random_label
from errors import NoCubeError, UsageError


def names_of(cube):
    return {v.name: value for v, value in cube.items()}


def test_constants_and_connectives(engine):
    x = engine.mk_var("i1")
    assert engine.conj(engine.true, x) == x
    assert engine.conj(x, engine.neg(x)) == engine.false
    assert engine.disj(x, engine.neg(x)) == engine.true
    assert engine.neg(engine.neg(x)) == x
    assert engine.conj() == engine.true
    assert engine.disj() == engine.false
    assert engine.mk_const(True) == engine.true
    assert engine.mk_const(False) == engine.false


def test_variable_roles_and_order(engine):
    assert [v.name for v in engine.inputs] == ["i1", "i2"]
    assert [v.name for v in engine.outputs] == ["o1", "o2"]
    assert engine.lookup("o2").kind is VarKind.OUTPUT
    assert [v.name for v in engine.ordered([engine.lookup("o1"), engine.lookup("i2")])] == ["i2", "o1"]


def test_undeclared_and_duplicate_variables(engine):
    with pytest.raises(UsageError):
        engine.mk_var("zz")
    with pytest.raises(UsageError):
        engine.lookup("zz")
    with pytest.raises(UsageError):
        BoolEngine(["a"], ["a"])


def test_compatible(engine):
    i1, o1 = engine.mk_var("i1"), engine.mk_var("o1")
    assert engine.compatible(i1, o1)
    assert not engine.compatible(i1, ~i1)
    assert engine.compatible(engine.true, i1 & ~o1)
    assert not engine.compatible(engine.false, engine.true)


def test_exists(engine):
    i1, o1 = engine.mk_var("i1"), engine.mk_var("o1")
    outputs = engine.outputs
    assert engine.exists(i1 & o1, outputs) == i1
    assert engine.exists(i1 & o1, [engine.lookup("i1")]) == o1
    assert engine.exists(o1 & ~o1, outputs) == engine.false
    assert engine.exists(i1, []) == i1


def test_some_pure_is_least(engine):
    o1, o2, i1 = engine.mk_var("o1"), engine.mk_var("o2"), engine.mk_var("i1")
    assert names_of(engine.some_pure(i1 & o1, engine.outputs)) == {"o1": True, "o2": False}
    assert names_of(engine.some_pure(~o1 | ~o2, engine.outputs)) == {"o1": False, "o2": False}
    assert names_of(engine.some_pure(engine.true, [])) == {}
    with pytest.raises(NoCubeError):
        engine.some_pure(engine.false, engine.outputs)


def test_enumerate_pure(engine):
    i1, i2 = engine.mk_var("i1"), engine.mk_var("i2")
    cubes = [names_of(c) for c in engine.enumerate_pure(i1 | i2, engine.inputs)]
    assert cubes == [
        {"i1": False, "i2": True},
        {"i1": True, "i2": False},
        {"i1": True, "i2": True},
    ]
    assert list(engine.enumerate_pure(engine.false, engine.inputs)) == []
    assert [names_of(c) for c in engine.enumerate_pure(engine.true, [])] == [{}]


def test_to_formula(engine):
    i1, o1 = engine.mk_var("i1"), engine.mk_var("o1")
    assert engine.to_formula(engine.true) == "t"
    assert engine.to_formula(engine.false) == "f"
    assert engine.to_formula(i1 & ~o1) == "i1&!o1"
    assert engine.to_formula(i1 & ~o1, {"i1": "0", "o1": "2"}) == "0&!2"
    assert engine.to_formula(i1 | o1) == "i1|!i1&o1"


def test_exists_matches_truth_table():
    rng = np.random.default_rng(3)
    engine = BoolEngine(["a", "b"], ["c", "d"])
    names = ["a", "b", "c", "d"]
    for _ in range(30):
        f = _random_label(engine, names, rng, 0.4)
        projected = engine.exists(f, engine.outputs)
        for a, b in itertools.product((False, True), repeat=2):
            expected = any(
                engine.evaluate(f, {"a": a, "b": b, "c": c, "d": d})
                for c, d in itertools.product((False, True), repeat=2)
            )
            point = {"a": a, "b": b, "c": False, "d": False}
            assert engine.evaluate(projected, point) == expected


def test_some_pure_is_compatible_and_enumerated_first():
    rng = np.random.default_rng(11)
    engine = BoolEngine(["a"], ["c", "d"])
    for _ in range(30):
        f = _random_label(engine, ["a", "c", "d"], rng, 0.5)
        if engine.is_false(f):
            continue
        cube = engine.some_pure(f, engine.outputs)
        assert engine.compatible(f, engine.cube_fn(cube))
        assert cube == next(engine.enumerate_pure(engine.exists(f, engine.inputs), engine.outputs))


def test_fingerprint_identifies_equal_functions(engine):
    i1, i2 = engine.mk_var("i1"), engine.mk_var("i2")
    assert engine.fingerprint(i1 & i2) == engine.fingerprint(i2 & i1)
    assert engine.fingerprint(i1) != engine.fingerprint(i2)


def test_enumerate_pure_counts_projected_models():
    rng = np.random.default_rng(13)
    engine = BoolEngine(["a", "b"], ["c", "d"])
    names = ["a", "b", "c", "d"]
    declared = engine.inputs + engine.outputs
    for _ in range(40):
        f = _random_label(engine, names, rng, 0.4)
        chosen = [v for v in declared if rng.random() < 0.5]
        kept = [v.name for v in chosen]
        projected = {
            tuple(point[n] for n in kept)
            for values in itertools.product((False, True), repeat=len(names))
            for point in [dict(zip(names, values))]
            if engine.evaluate(f, point)
        }
        cubes = [names_of(c) for c in engine.enumerate_pure(f, chosen)]
        assert len(cubes) == len(projected)
        assert {tuple(c[n] for n in kept) for c in cubes} == projected


def test_compatible_matches_truth_table():
    rng = np.random.default_rng(17)
    engine = BoolEngine(["a", "b"], ["c"])
    names = ["a", "b", "c"]
    for _ in range(60):
        x = _random_label(engine, names, rng, 0.5)
        y = _random_label(engine, names, rng, 0.5)
        overlap = any(
            engine.evaluate(x, point) and engine.evaluate(y, point)
            for values in itertools.product((False, True), repeat=len(names))
            for point in [dict(zip(names, values))]
        )
        assert engine.compatible(x, y) == overlap
        assert overlap == (not engine.is_false(engine.conj(x, y)))
