import numpy as np
import pytest

from errors import UsageError
from valuation import LaneVector, PlainVector, VectorBackend, VectorSpace, lane_dtype


@pytest.fixture(params=[False, True], ids=["plain", "lanes"])
def lanes(request):
    return request.param


def test_dominates_and_meet(lanes):
    space = VectorSpace(2, 3, lanes=lanes)
    a, b = space.make([2, 1]), space.make([1, 1])
    assert a.dominates(b)
    assert not b.dominates(a)
    assert a.dominates(a)
    assert not space.make([2, 0]).dominates(space.make([1, 1]))
    assert space.make([2, 0]).meet(space.make([1, 1])) == space.make([1, 0])


def test_dec_if(lanes):
    space = VectorSpace(2, 3, lanes=lanes)
    assert space.make([2, 0]).dec_if([1, 0]) == space.make([1, 0])
    assert space.make([-1, 0]).dec_if([1, 1]) == space.make([-1, -1])
    with pytest.raises(UsageError):
        space.make([2, 0]).dec_if([1])


def test_dec_if_clears_bits(lanes):
    space = VectorSpace(3, 3, boolean_states=[1], lanes=lanes)
    v = space.make([2, 1], [True])
    assert v.dec_if([0, 1, 1]) == space.make([2, 0], [False])
    assert v.dec_if([0, 0, 0]) == v


def test_score_and_repr(lanes):
    space = VectorSpace(3, 3, boolean_states=[2], lanes=lanes)
    v = space.make([2, -1], [True])
    assert v.score() == 2
    assert repr(v) == "(2,-1|1)"
    assert repr(VectorSpace(2, 3, lanes=lanes).make([2, 1])) == "(2,1)"


def test_shape_mismatch(lanes):
    v = VectorSpace(2, 3, lanes=lanes).make([1, 1])
    with pytest.raises(UsageError):
        v.dominates(VectorSpace(3, 3, lanes=lanes).make([1, 1, 1]))
    with pytest.raises(UsageError):
        v.meet(VectorSpace(2, 4, lanes=lanes).make([1, 1]))


def test_make_rejects_out_of_range(lanes):
    space = VectorSpace(2, 3, lanes=lanes)
    with pytest.raises(UsageError):
        space.make([4, 0])
    with pytest.raises(UsageError):
        space.make([0])
    with pytest.raises(UsageError):
        VectorSpace(2, 0)


def test_lane_dtype():
    assert lane_dtype(1) is np.int8
    assert lane_dtype(126) is np.int8
    assert lane_dtype(127) is np.int16
    assert lane_dtype(32766) is np.int16
    with pytest.raises(UsageError):
        lane_dtype(40000)
    with pytest.raises(UsageError):
        VectorSpace(1, 40000, lanes=True)


def test_backends():
    assert VectorSpace(2, 3).backend is VectorBackend.PLAIN
    assert VectorSpace(2, 3, boolean_states=[0], lanes=True).backend is VectorBackend.LANES_BITS
    assert VectorBackend.of(True, False).lanes
    assert not VectorBackend.PLAIN_BITS.lanes


def test_space_helpers(lanes):
    space = VectorSpace(3, 4, boolean_states=[0], lanes=lanes)
    assert space.top() == space.make([4, 4], [True])
    assert space.bottom() == space.make([-1, -1], [False])
    assert space.witness(0) == space.make([-1, -1], [True])
    assert space.witness(2) == space.make([-1, 0], [False])
    assert space.values(space.vector([3, 2, -1])) == [4, 2, -1]


def test_vectors_are_immutable():
    v = VectorSpace(2, 3, lanes=True).make([1, 1])
    with pytest.raises(ValueError):
        v._counts[0] = 3


def test_step_examples(lanes):
    loop = VectorSpace(1, 3, lanes=lanes)
    assert loop.compile_step([(0, 0, 1)])(loop.make([3])) == loop.make([2])
    assert loop.compile_step([(0, 0, 1)])(loop.make([-1])) == loop.make([-1])
    # no pair from a state gives k
    assert loop.compile_step([])(loop.make([-1])) == loop.make([3])

    space = VectorSpace(3, 3, lanes=lanes)
    step = space.compile_step([(0, 1, 0), (0, 2, 1), (1, 1, 0)])
    assert step(space.make([0, 2, 1])) == space.make([0, 2, 3])


def test_step_with_bits(lanes):
    # q0 boolean, q1 counted and Büchi, q2 boolean: q0 -> q1*, q0 -> q2, q2 -> q2
    space = VectorSpace(3, 2, boolean_states=[0, 2], lanes=lanes)
    step = space.compile_step([(0, 1, 1), (0, 2, 0), (2, 2, 0), (1, 1, 1)])
    assert step(space.make([1], [False, True])) == space.make([0], [True, True])
    assert step(space.make([0], [True, True])) == space.make([-1], [False, True])
    assert step(space.make([1], [True, False])) == space.make([0], [False, False])
    # a boolean state without pairs keeps its bit
    assert space.compile_step([])(space.bottom()) == space.make([2], [True, True])


def test_counted_source_with_boolean_target(lanes):
    space = VectorSpace(2, 2, boolean_states=[1], lanes=lanes)
    with pytest.raises(UsageError):
        space.compile_step([(0, 1, 0)])


def test_plain_and_lanes_agree():
    rng = np.random.default_rng(0)
    for _ in range(40):
        n = int(rng.integers(1, 6))
        k = int(rng.integers(1, 5))
        boolean = [q for q in range(n) if rng.random() < 0.3]
        plain = VectorSpace(n, k, boolean_states=boolean)
        lane = VectorSpace(n, k, boolean_states=boolean, lanes=True)
        pairs = []
        for p in range(n):
            for q in range(n):
                if rng.random() < 0.5 and not (p not in boolean and q in boolean):
                    pairs.append((p, q, int(rng.integers(0, 2))))
        plain_step, lane_step = plain.compile_step(pairs), lane.compile_step(pairs)
        for _ in range(10):
            values = [int(x) for x in rng.integers(-1, k + 1, size=n)]
            other = [int(x) for x in rng.integers(-1, k + 1, size=n)]
            mask = [int(x) for x in rng.integers(0, 2, size=n)]
            u, w = plain.vector(values), lane.vector(values)
            assert isinstance(u, PlainVector) and isinstance(w, LaneVector)
            assert plain_step(u).key() == lane_step(w).key()
            assert u.meet(plain.vector(other)).key() == w.meet(lane.vector(other)).key()
            assert u.dominates(plain.vector(other)) == w.dominates(lane.vector(other))
            assert u.dec_if(mask).key() == w.dec_if(mask).key()
            assert u.score() == w.score()


def test_meet_is_greatest_lower_bound():
    rng = np.random.default_rng(1)
    space = VectorSpace(4, 3, boolean_states=[3])
    for _ in range(50):
        a = space.vector([int(x) for x in rng.integers(-1, 4, size=4)])
        b = space.vector([int(x) for x in rng.integers(-1, 4, size=4)])
        m = a.meet(b)
        assert a.dominates(m) and b.dominates(m)
        assert m == b.meet(a)
        if a.dominates(b):
            assert m == b


@pytest.mark.parametrize("k", [1, 2, 7])
def test_dec_if_saturates_exhaustively(k, lanes):
    space = VectorSpace(2, k, lanes=lanes)
    for a in range(-1, k + 1):
        for b in range(-1, k + 1):
            for mask in ([0, 0], [0, 1], [1, 0], [1, 1]):
                result = space.make([a, b]).dec_if(mask)
                assert result.key() == (max(a - mask[0], -1), max(b - mask[1], -1))


def test_dominates_is_a_partial_order(lanes):
    rng = np.random.default_rng(5)
    space = VectorSpace(3, 2, boolean_states=[1], lanes=lanes)
    vectors = [space.vector([int(x) for x in rng.integers(-1, 3, size=3)]) for _ in range(25)]
    for a in vectors:
        assert a.dominates(a)
        for b in vectors:
            if a.dominates(b) and b.dominates(a):
                assert a == b
            for c in vectors:
                if a.dominates(b) and b.dominates(c):
                    assert a.dominates(c)


def test_score_is_monotone_under_domination(lanes):
    rng = np.random.default_rng(9)
    space = VectorSpace(5, 4, boolean_states=[0, 3], lanes=lanes)
    checked = 0
    for _ in range(400):
        a = space.vector([int(x) for x in rng.integers(-1, 5, size=5)])
        b = a.meet(space.vector([int(x) for x in rng.integers(-1, 5, size=5)]))
        c = space.vector([int(x) for x in rng.integers(-1, 5, size=5)])
        for u, v in ((a, b), (a, c), (c, a)):
            if u.dominates(v):
                assert u.score() >= v.score()
                checked += 1
    assert checked >= 400
