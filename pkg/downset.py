import bisect
import logging
from enum import Enum
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

import config
from errors import UsageError
from valuation import StateVector, VectorSpace

logger = logging.getLogger(__name__)

Key = Tuple[int, ...]

# Cells of one broadcast comparison block; larger products are chunked.
ROW_BLOCK = 1 << 20


class DownsetBackend(str, Enum):
    ANTICHAIN = "antichain"
    FULL = "full"
    KDTREE = "kdtree"
    BINS = "bins"


def _key_dominates(a: Key, b: Key) -> bool:
    return all(x >= y for x, y in zip(a, b))


def maximal_rows(rows: np.ndarray) -> np.ndarray:
    """The rows no other row dominates, without duplicates, by falling score.

    After sorting by score a row can only be dominated by an earlier one,
    so each surviving row sweeps the rows behind it once.
    """
    if len(rows) <= 1:
        return rows
    rows = np.unique(rows, axis=0)
    rows = rows[np.argsort(-rows.sum(axis=1, dtype=np.int64), kind="stable")]
    keep = np.ones(len(rows), dtype=bool)
    for i in range(len(rows) - 1):
        if keep[i]:
            behind = keep[i + 1:]
            behind &= ~np.all(rows[i + 1:] <= rows[i], axis=1)
    return rows[keep]


def _blocks(outer: int, inner: int, width: int) -> Iterator[slice]:
    step = max(1, ROW_BLOCK // max(1, inner * width))
    for start in range(0, outer, step):
        yield slice(start, start + step)


def meet_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Maximal pairwise meets of two row sets."""
    if not len(a) or not len(b):
        return a[:0]
    width = a.shape[1]
    parts = [
        maximal_rows(np.minimum(a[block, np.newaxis, :], b[np.newaxis, :, :]).reshape(-1, width))
        for block in _blocks(len(a), len(b), width)
    ]
    return maximal_rows(np.concatenate(parts))


def covered_rows(maxima: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Mask of the points dominated by some row of `maxima`."""
    if not len(maxima):
        return np.zeros(len(points), dtype=bool)
    return np.concatenate([
        np.any(np.all(maxima[np.newaxis, :, :] >= points[block, np.newaxis, :], axis=2), axis=1)
        for block in _blocks(len(points), len(maxima), points.shape[1])
    ] or [np.zeros(0, dtype=bool)])


class Downset:
    """Downward-closed set of vectors, stored through its maximal elements.

    Subclasses decide how the elements are indexed; the semantic value is
    always the downward closure of what is stored. Over a lane vector space
    union, intersect, equal and covers work on the maximal elements stacked
    as one row matrix instead of vector by vector.
    """

    backend: DownsetBackend

    def __init__(self, space: VectorSpace):
        self.space = space
        self._rows: Optional[np.ndarray] = None

    # -- backend hooks --------------------------------------------------

    def contains(self, v: StateVector) -> bool:
        raise NotImplementedError

    def insert(self, v: StateVector) -> bool:
        """Add the closure of v; returns whether the set grew."""
        raise NotImplementedError

    def max_elements(self) -> List[StateVector]:
        raise NotImplementedError

    def empty_like(self) -> "Downset":
        return type(self)(self.space)

    def bulk_done(self):
        pass

    def _load(self, antichain: List[StateVector]):
        """Fill an empty downset with vectors known to be pairwise incomparable."""
        for v in antichain:
            self.insert(v)
        self.bulk_done()

    # -- shared operations ----------------------------------------------

    def _check(self, v: StateVector):
        if v.shape != self.space.shape:
            raise UsageError(f"vector shape {v.shape} does not match downset shape {self.space.shape}")

    def _check_other(self, other: "Downset"):
        if other.space.shape != self.space.shape:
            raise UsageError(f"downset shapes differ: {self.space.shape} vs {other.space.shape}")

    def rows(self) -> np.ndarray:
        """Maximal elements as a row matrix; lane vector spaces only."""
        if self._rows is None:
            self._rows = self.space.stack(self.max_elements())
        return self._rows

    def with_rows(self, rows: np.ndarray) -> "Downset":
        """New downset of the same backend holding the closure of `rows`."""
        rows = maximal_rows(rows)
        rows.setflags(write=False)
        result = self.empty_like()
        result._load([self.space.from_row(row) for row in rows])
        result._rows = rows
        return result

    def copy(self) -> "Downset":
        if self.space.lanes:
            return self.with_rows(self.rows())
        result = self.empty_like()
        for v in self.max_elements():
            result.insert(v)
        result.bulk_done()
        return result

    def union(self, other: "Downset") -> "Downset":
        self._check_other(other)
        if self.space.lanes:
            return self.with_rows(np.concatenate([self.rows(), other.rows()]))
        result = self.copy()
        for v in other.max_elements():
            result.insert(v)
        result.bulk_done()
        return result

    def intersect(self, other: "Downset") -> "Downset":
        """Pairwise meets of both antichains, re-filtered."""
        self._check_other(other)
        if self.space.lanes:
            return self.with_rows(meet_rows(self.rows(), other.rows()))
        result = self.empty_like()
        theirs = other.max_elements()
        for u in self.max_elements():
            for w in theirs:
                result.insert(u.meet(w))
        result.bulk_done()
        return result

    def equal(self, other: "Downset") -> bool:
        self._check_other(other)
        if self.space.lanes:
            mine, theirs = self.rows(), other.rows()
            return mine.shape == theirs.shape and set(map(tuple, mine.tolist())) == set(map(tuple, theirs.tolist()))
        return (all(other.contains(v) for v in self.max_elements())
                and all(self.contains(v) for v in other.max_elements()))

    def covers(self, vectors: Sequence[StateVector]) -> np.ndarray:
        """Membership mask of several vectors at once."""
        for v in vectors:
            self._check(v)
        if self.space.lanes:
            return covered_rows(self.rows(), self.space.stack(vectors))
        return np.array([self.contains(v) for v in vectors], dtype=bool)

    def is_empty(self) -> bool:
        return not self.max_elements()

    def __len__(self):
        return len(self.max_elements())

    def __iter__(self) -> Iterator[StateVector]:
        return iter(self.max_elements())

    def dump(self) -> str:
        """One vector per line, sorted lexicographically."""
        return "\n".join(repr(v) for v in sorted(self.max_elements(), key=StateVector.key))

    def get_stats(self) -> Dict[str, Any]:
        counted, bits, k = self.space.shape
        return {
            "backend": self.backend.value,
            "vectors": self.space.backend.value,
            "dimensions": counted + bits,
            "k": k,
            "antichain_size": len(self.max_elements()),
        }

    def __repr__(self):
        return f"{type(self).__name__}({len(self)} maximal elements)"


class AntichainDownset(Downset):
    """Maximal elements in an insertion-ordered dict, scanned linearly."""

    backend = DownsetBackend.ANTICHAIN

    def __init__(self, space: VectorSpace):
        super().__init__(space)
        self._elements: Dict[Key, StateVector] = {}

    def _dominating(self, v: StateVector) -> bool:
        score = v.score()
        return any(w.score() >= score and w.dominates(v) for w in self._elements.values())

    def _dominated_by(self, v: StateVector) -> List[Key]:
        score = v.score()
        return [key for key, w in self._elements.items() if w.score() <= score and v.dominates(w)]

    def _added(self, key: Key, v: StateVector):
        pass

    def _removed(self, key: Key, v: StateVector):
        pass

    def contains(self, v):
        self._check(v)
        return self._dominating(v)

    def insert(self, v):
        self._check(v)
        if self._dominating(v):
            return False
        for key in self._dominated_by(v):
            self._removed(key, self._elements.pop(key))
        key = v.key()
        self._elements[key] = v
        self._added(key, v)
        self._rows = None
        return True

    def _load(self, antichain):
        for v in antichain:
            key = v.key()
            self._elements[key] = v
            self._added(key, v)
        self.bulk_done()

    def max_elements(self):
        return list(self._elements.values())

    def __len__(self):
        return len(self._elements)


class FullSetDownset(Downset):
    """Keeps every inserted vector and filters domination lazily.

    The store is compacted to its antichain once it grows past
    `compact_factor` times the last antichain size seen.
    """

    backend = DownsetBackend.FULL

    def __init__(self, space: VectorSpace, compact_factor: int = None):
        super().__init__(space)
        self.compact_factor = compact_factor or config.FULLSET_COMPACT
        self._store: Dict[Key, StateVector] = {}
        self._antichain_size = 1
        self.compactions = 0

    def empty_like(self):
        return FullSetDownset(self.space, self.compact_factor)

    def contains(self, v):
        self._check(v)
        return any(w.dominates(v) for w in self._store.values())

    def insert(self, v):
        self._check(v)
        if self.contains(v):
            return False
        self._store[v.key()] = v
        if len(self._store) > self.compact_factor * self._antichain_size:
            self._compact()
        self._rows = None
        return True

    def _load(self, antichain):
        self._store = {v.key(): v for v in antichain}
        self._antichain_size = max(1, len(antichain))

    def _compact(self):
        kept = self.max_elements()
        self._store = {v.key(): v for v in kept}
        self.compactions += 1

    def max_elements(self):
        stored = list(self._store.values())
        result = [
            v for i, v in enumerate(stored)
            if not any(j != i and w.dominates(v) for j, w in enumerate(stored))
        ]
        self._antichain_size = max(1, len(result))
        return result

    def get_stats(self):
        stats = super().get_stats()
        stats["stored"] = len(self._store)
        stats["compactions"] = self.compactions
        return stats


class _KdNode:
    __slots__ = ("axis", "split", "left", "right", "items", "upper", "lower")

    def __init__(self):
        self.axis = 0
        self.split = 0
        self.left: Optional["_KdNode"] = None
        self.right: Optional["_KdNode"] = None
        self.items: Optional[List[Key]] = None
        self.upper: Key = ()
        self.lower: Key = ()


class KdTreeDownset(AntichainDownset):
    """Antichain indexed by a k-d tree over the vector keys.

    The tree is built by median split on successive dimensions and rebuilt
    instead of being updated in place. Vectors inserted since the last build
    sit in a pending list; evicted ones stay in the tree until the next
    rebuild and are skipped by lookups.
    """

    backend = DownsetBackend.KDTREE
    leaf_size = 8

    def __init__(self, space: VectorSpace, rebuild_after: int = None):
        super().__init__(space)
        self.rebuild_after = rebuild_after or config.KDTREE_REBUILD
        self._root: Optional[_KdNode] = None
        self._pending: List[Key] = []
        self._stale = 0
        self.rebuilds = 0

    def empty_like(self):
        return KdTreeDownset(self.space, self.rebuild_after)

    def _build(self, keys: List[Key], depth: int) -> Optional[_KdNode]:
        if not keys:
            return None
        node = _KdNode()
        node.upper = tuple(max(col) for col in zip(*keys))
        node.lower = tuple(min(col) for col in zip(*keys))
        dims = len(keys[0])
        if len(keys) <= self.leaf_size or dims == 0:
            node.items = keys
            return node
        node.axis = depth % dims
        keys = sorted(keys, key=lambda key: key[node.axis])
        mid = len(keys) // 2
        node.split = keys[mid][node.axis]
        left = [key for key in keys if key[node.axis] < node.split]
        right = [key for key in keys if key[node.axis] >= node.split]
        if not left or not right:
            node.items = keys
            return node
        node.left = self._build(left, depth + 1)
        node.right = self._build(right, depth + 1)
        return node

    def _rebuild(self):
        self._root = self._build(list(self._elements), 0)
        self._pending = []
        self._stale = 0
        self.rebuilds += 1

    def bulk_done(self):
        if self._pending or self._stale:
            self._rebuild()

    def _load(self, antichain):
        for v in antichain:
            self._elements[v.key()] = v
        self._rebuild()

    def _search_dominating(self, node: Optional[_KdNode], target: Key) -> bool:
        if node is None or not _key_dominates(node.upper, target):
            return False
        if node.items is not None:
            # Stale keys are still sound here: whatever evicted them dominates them.
            return any(_key_dominates(key, target) for key in node.items)
        return (self._search_dominating(node.right, target)
                or self._search_dominating(node.left, target))

    def _search_dominated(self, node: Optional[_KdNode], target: Key, out: List[Key]):
        if node is None or not _key_dominates(target, node.lower):
            return
        if node.items is not None:
            out.extend(key for key in node.items
                       if key in self._elements and _key_dominates(target, key))
            return
        self._search_dominated(node.left, target, out)
        self._search_dominated(node.right, target, out)

    def _dominating(self, v):
        target = v.key()
        if any(_key_dominates(key, target) for key in self._pending if key in self._elements):
            return True
        return self._search_dominating(self._root, target)

    def _dominated_by(self, v):
        target = v.key()
        found: List[Key] = []
        self._search_dominated(self._root, target, found)
        found.extend(key for key in self._pending
                     if key in self._elements and _key_dominates(target, key))
        return list(dict.fromkeys(found))

    def _added(self, key, v):
        self._pending.append(key)
        if len(self._pending) > self.rebuild_after:
            self._rebuild()

    def _removed(self, key, v):
        self._stale += 1
        if self._stale > max(self.rebuild_after, len(self._elements)):
            self._rebuild()

    def _depth(self, node: Optional[_KdNode]) -> int:
        if node is None:
            return 0
        if node.items is not None:
            return 1
        return 1 + max(self._depth(node.left), self._depth(node.right))

    def get_stats(self):
        stats = super().get_stats()
        stats["tree_depth"] = self._depth(self._root)
        stats["pending"] = len(self._pending)
        stats["rebuilds"] = self.rebuilds
        return stats


class BinnedDownset(AntichainDownset):
    """Antichain whose elements are binned by score.

    Only bins scoring at least score(v) can dominate v, and v can only evict
    elements from bins scoring at most score(v).
    """

    backend = DownsetBackend.BINS

    def __init__(self, space: VectorSpace):
        super().__init__(space)
        self._bins: Dict[int, Dict[Key, StateVector]] = {}
        self._scores: List[int] = []

    def _dominating(self, v):
        start = bisect.bisect_left(self._scores, v.score())
        return any(
            w.dominates(v)
            for score in self._scores[start:]
            for w in self._bins[score].values()
        )

    def _dominated_by(self, v):
        stop = bisect.bisect_right(self._scores, v.score())
        return [
            key
            for score in self._scores[:stop]
            for key, w in self._bins[score].items()
            if v.dominates(w)
        ]

    def _added(self, key, v):
        score = v.score()
        if score not in self._bins:
            bisect.insort(self._scores, score)
            self._bins[score] = {}
        self._bins[score][key] = v

    def _removed(self, key, v):
        score = v.score()
        del self._bins[score][key]
        if not self._bins[score]:
            del self._bins[score]
            self._scores.pop(bisect.bisect_left(self._scores, score))

    def get_stats(self):
        stats = super().get_stats()
        stats["bins"] = len(self._bins)
        return stats


_BACKENDS = {
    DownsetBackend.ANTICHAIN: AntichainDownset,
    DownsetBackend.FULL: FullSetDownset,
    DownsetBackend.KDTREE: KdTreeDownset,
    DownsetBackend.BINS: BinnedDownset,
}


def make_downset(space: VectorSpace, backend=None) -> Downset:
    """Empty downset of the given backend (config.DOWNSET_BACKEND by default)."""
    try:
        backend = DownsetBackend(backend or config.DOWNSET_BACKEND)
    except ValueError:
        raise UsageError(f"unknown downset backend '{backend}'") from None
    return _BACKENDS[backend](space)


def from_vector(space: VectorSpace, v: StateVector, backend=None) -> Downset:
    result = make_downset(space, backend)
    result.insert(v)
    return result


def safe_k(space: VectorSpace, backend=None) -> Downset:
    """Downward closure of the all-k vector."""
    return from_vector(space, space.top(), backend)
