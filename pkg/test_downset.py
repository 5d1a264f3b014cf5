import itertools

import numpy as np
import pytest

from downset import (BinnedDownset, Downset, DownsetBackend, FullSetDownset, KdTreeDownset, from_vector,
                     make_downset, maximal_rows, meet_rows, safe_k)
from errors import UsageError
from valuation import VectorSpace

BACKENDS = [b.value for b in DownsetBackend]


@pytest.fixture(params=list(itertools.product(BACKENDS, [False, True])),
                ids=lambda p: f"{p[0]}-{'lanes' if p[1] else 'plain'}")
def setup(request):
    backend, lanes = request.param
    return backend, VectorSpace(2, 3, lanes=lanes)


def keys(downset):
    return sorted(v.key() for v in downset.max_elements())


def test_from_vector_contains(setup):
    backend, space = setup
    S = from_vector(space, space.make([2, 1]), backend)
    assert S.contains(space.make([1, 1]))
    assert S.contains(space.make([2, 1]))
    assert not S.contains(space.make([3, 0]))


def test_insert_reports_growth(setup):
    backend, space = setup
    S = from_vector(space, space.make([2, 1]), backend)
    assert not S.insert(space.make([1, 0]))
    assert S.insert(space.make([3, 0]))
    assert keys(S) == [(2, 1), (3, 0)]
    assert S.insert(space.make([3, 3]))
    assert keys(S) == [(3, 3)]


def test_union_and_intersect(setup):
    backend, space = setup
    A = from_vector(space, space.make([2, 1]), backend)
    B = from_vector(space, space.make([1, 2]), backend)
    assert keys(A.union(B)) == [(1, 2), (2, 1)]
    assert keys(A.intersect(B)) == [(1, 1)]
    top = safe_k(space, backend)
    assert A.intersect(top).equal(A)
    assert top.intersect(A).equal(A)


def test_max_elements_of_single_vector(setup):
    backend, space = setup
    v = space.make([0, 3])
    assert from_vector(space, v, backend).max_elements() == [v]


def test_empty_and_equal(setup):
    backend, space = setup
    S = make_downset(space, backend)
    assert S.is_empty()
    assert len(S) == 0
    assert not S.contains(space.bottom())
    assert S.equal(make_downset(space, backend))
    assert not S.equal(from_vector(space, space.bottom(), backend))


def test_dump_and_stats(setup):
    backend, space = setup
    S = from_vector(space, space.make([3, 0]), backend)
    S.insert(space.make([0, 3]))
    assert S.dump() == "(0,3)\n(3,0)"
    stats = S.get_stats()
    assert stats["backend"] == backend
    assert stats["antichain_size"] == 2
    assert stats["dimensions"] == 2


def test_shape_mismatch(setup):
    backend, space = setup
    S = from_vector(space, space.top(), backend)
    other = VectorSpace(3, 3)
    with pytest.raises(UsageError):
        S.contains(other.top())
    with pytest.raises(UsageError):
        S.union(safe_k(other, backend))


def test_unknown_backend():
    with pytest.raises(UsageError):
        make_downset(VectorSpace(1, 1), "quadtree")


def explicit_closure(vectors, n, k):
    return {
        point for point in itertools.product(range(-1, k + 1), repeat=n)
        if any(all(a >= b for a, b in zip(v, point)) for v in vectors)
    }


def random_vectors(rng, space, count):
    n = space.num_states
    return [space.vector([int(x) for x in rng.integers(-1, space.k + 1, size=n)]) for _ in range(count)]


@pytest.mark.parametrize("backend", BACKENDS)
def test_matches_explicit_closure(backend):
    rng = np.random.default_rng(2)
    for _ in range(10):
        space = VectorSpace(3, 2)
        inserted = random_vectors(rng, space, int(rng.integers(1, 12)))
        S = make_downset(space, backend)
        for v in inserted:
            S.insert(v)
        S.bulk_done()
        closure = explicit_closure([v.key() for v in inserted], 3, 2)
        for point in itertools.product(range(-1, 3), repeat=3):
            assert S.contains(space.vector(list(point))) == (point in closure)


def test_backends_agree_on_random_sequences():
    rng = np.random.default_rng(4)
    for _ in range(15):
        n = int(rng.integers(1, 5))
        boolean = [q for q in range(n) if rng.random() < 0.3]
        for lanes in (False, True):
            space = VectorSpace(n, 3, boolean_states=boolean, lanes=lanes)
            first = random_vectors(rng, space, 20)
            second = random_vectors(rng, space, 20)
            results = []
            for backend in BACKENDS:
                A, B = make_downset(space, backend), make_downset(space, backend)
                growth = [A.insert(v) for v in first] + [B.insert(v) for v in second]
                A.bulk_done()
                B.bulk_done()
                results.append((growth, keys(A), keys(A.union(B)), keys(A.intersect(B))))
            assert all(r == results[0] for r in results)


def random_downset(rng, space, backend):
    S = make_downset(space, backend)
    for v in random_vectors(rng, space, int(rng.integers(0, 6))):
        S.insert(v)
    S.bulk_done()
    return S


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("lanes", [False, True], ids=["plain", "lanes"])
def test_union_and_intersect_laws(backend, lanes):
    rng = np.random.default_rng(14)
    space = VectorSpace(3, 2, boolean_states=[2], lanes=lanes)
    points = random_vectors(rng, space, 40)
    for _ in range(20):
        S, T, U = (random_downset(rng, space, backend) for _ in range(3))
        for op in (Downset.union, Downset.intersect):
            assert op(S, T).equal(op(T, S))
            assert op(op(S, T), U).equal(op(S, op(T, U)))
            assert op(S, S).equal(S)
        meet, join = S.intersect(T), S.union(T)
        for v in points:
            assert not meet.contains(v) or S.contains(v)
            assert not S.contains(v) or join.contains(v)
            assert meet.contains(v) == (S.contains(v) and T.contains(v))
            assert join.contains(v) == (S.contains(v) or T.contains(v))


def test_maximal_rows_keeps_the_antichain():
    rng = np.random.default_rng(16)
    for _ in range(30):
        space = VectorSpace(4, 3, lanes=True)
        vectors = random_vectors(rng, space, int(rng.integers(1, 30)))
        reference = make_downset(space, "antichain")
        for v in vectors:
            reference.insert(v)
        rows = maximal_rows(space.stack(vectors))
        assert sorted(map(tuple, rows.tolist())) == keys(reference)
        scores = rows.sum(axis=1)
        assert list(scores) == sorted(scores, reverse=True)


def test_meet_rows_matches_pairwise_meets():
    rng = np.random.default_rng(18)
    for _ in range(30):
        space = VectorSpace(3, 2, lanes=True)
        A = random_downset(rng, space, "antichain")
        B = random_downset(rng, space, "antichain")
        reference = make_downset(space, "antichain")
        for u in A.max_elements():
            for w in B.max_elements():
                reference.insert(u.meet(w))
        met = meet_rows(A.rows(), B.rows())
        assert sorted(map(tuple, met.tolist())) == keys(reference)


@pytest.mark.parametrize("lanes", [False, True], ids=["plain", "lanes"])
def test_covers_matches_contains(lanes):
    rng = np.random.default_rng(20)
    space = VectorSpace(4, 2, boolean_states=[1], lanes=lanes)
    for _ in range(20):
        S = random_downset(rng, space, "antichain")
        points = random_vectors(rng, space, 25)
        assert S.covers(points).tolist() == [S.contains(v) for v in points]
    assert S.covers([]).tolist() == []


@pytest.mark.parametrize("backend", BACKENDS)
def test_stored_elements_form_an_antichain(backend):
    rng = np.random.default_rng(6)
    space = VectorSpace(4, 3)
    S = make_downset(space, backend)
    for v in random_vectors(rng, space, 60):
        S.insert(v)
    elements = S.max_elements()
    for a, b in itertools.permutations(elements, 2):
        assert not a.dominates(b)


def test_kdtree_rebuilds():
    rng = np.random.default_rng(8)
    space = VectorSpace(5, 4)
    S = KdTreeDownset(space, rebuild_after=3)
    reference = make_downset(space, "antichain")
    vectors = random_vectors(rng, space, 200)
    for v in vectors:
        assert S.insert(v) == reference.insert(v)
    assert S.rebuilds > 0
    assert keys(S) == keys(reference)
    for v in random_vectors(rng, space, 100):
        assert S.contains(v) == reference.contains(v)
    S.bulk_done()
    stats = S.get_stats()
    assert stats["pending"] == 0
    assert stats["tree_depth"] >= 1


def test_fullset_compacts():
    space = VectorSpace(2, 6)
    S = FullSetDownset(space, compact_factor=2)
    for c in range(-1, 7):
        S.insert(space.make([c, c]))
    assert S.compactions > 0
    assert keys(S) == [(6, 6)]
    assert S.get_stats()["stored"] >= 1


def test_bins_track_scores():
    space = VectorSpace(2, 3)
    S = BinnedDownset(space)
    S.insert(space.make([3, 0]))
    S.insert(space.make([0, 1]))
    assert S.get_stats()["bins"] == 2
    S.insert(space.make([3, 3]))
    assert S.get_stats()["bins"] == 1


@pytest.mark.slow
def test_backends_agree_at_scale():
    rng = np.random.default_rng(100)
    for _ in range(100_000):
        n = int(rng.integers(1, 9))
        k = int(rng.integers(1, 8))
        space = VectorSpace(n, k, lanes=bool(rng.integers(0, 2)))
        downsets = [make_downset(space, backend) for backend in BACKENDS]
        for v in random_vectors(rng, space, int(rng.integers(1, 10))):
            growth = {S.insert(v) for S in downsets}
            assert len(growth) == 1
            for S in downsets:
                for a, b in itertools.permutations(S.max_elements(), 2):
                    assert not a.dominates(b)
        point = random_vectors(rng, space, 1)[0]
        assert len({S.contains(point) for S in downsets}) == 1
        assert all(S.equal(downsets[0]) for S in downsets)
