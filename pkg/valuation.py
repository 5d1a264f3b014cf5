import logging
from enum import Enum
from typing import Callable, Dict, Iterable, List, Sequence, Tuple

import numpy as np

from errors import UsageError

logger = logging.getLogger(__name__)

INT8_MAX_K = 126
INT16_MAX_K = 32766


class VectorBackend(str, Enum):
    PLAIN = "plain"
    PLAIN_BITS = "plain+bits"
    LANES = "lanes"
    LANES_BITS = "lanes+bits"

    @classmethod
    def of(cls, lanes: bool, bits: bool) -> "VectorBackend":
        name = ("lanes" if lanes else "plain") + ("+bits" if bits else "")
        return cls(name)

    @property
    def lanes(self) -> bool:
        return self.value.startswith("lanes")


def lane_dtype(k: int):
    """Smallest signed lane type holding [-2, k]."""
    if k <= INT8_MAX_K:
        return np.int8
    if k <= INT16_MAX_K:
        return np.int16
    raise UsageError(f"k={k} does not fit a 16-bit lane (max {INT16_MAX_K})")


class StateVector:
    """A valuation of the automaton states in [-1, k].

    Counted states carry an integer, boolean states a single bit meaning
    "value >= 0". Vectors are immutable; every operation returns a new one.
    """

    __slots__ = ("shape", "_score", "_key")

    def __init__(self, shape: Tuple[int, int, int]):
        self.shape = shape
        self._score = None
        self._key = None

    def _check(self, other: "StateVector"):
        if self.shape != other.shape:
            raise UsageError(f"vector shapes differ: {self.shape} vs {other.shape}")

    @property
    def k(self) -> int:
        return self.shape[2]

    def counted(self) -> Tuple[int, ...]:
        raise NotImplementedError

    def bits(self) -> Tuple[bool, ...]:
        raise NotImplementedError

    def key(self) -> Tuple[int, ...]:
        """Counted entries followed by the bits as 0/1.

        Domination of vectors is componentwise >= on keys.
        """
        if self._key is None:
            self._key = tuple(self.counted()) + tuple(int(b) for b in self.bits())
        return self._key

    def score(self) -> int:
        if self._score is None:
            self._score = self._compute_score()
        return self._score

    def dominates(self, other: "StateVector") -> bool:
        self._check(other)
        return self._dominates(other)

    def meet(self, other: "StateVector") -> "StateVector":
        self._check(other)
        return self._meet(other)

    def dec_if(self, mask: Sequence[int]) -> "StateVector":
        """Saturating decrement of the masked slots.

        `mask` covers the counted slots then the bit slots. A masked counted
        entry drops by one with -1 as floor; a masked bit is cleared.
        """
        n_counted, n_bits, _ = self.shape
        if len(mask) != n_counted + n_bits:
            raise UsageError(f"mask has {len(mask)} entries, vector has {n_counted + n_bits}")
        return self._dec_if(mask[:n_counted], mask[n_counted:])

    def __eq__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        return self.shape == other.shape and self.key() == other.key()

    def __hash__(self):
        return hash((self.shape, self.key()))

    def __repr__(self):
        text = ",".join(str(c) for c in self.counted())
        if self.shape[1]:
            text += "|" + "".join("1" if b else "0" for b in self.bits())
        return f"({text})"


class PlainVector(StateVector):
    __slots__ = ("_counts", "_bits")

    def __init__(self, counts: Sequence[int], bits: Sequence[bool], k: int):
        super().__init__((len(counts), len(bits), k))
        self._counts = tuple(int(c) for c in counts)
        self._bits = tuple(bool(b) for b in bits)

    def counted(self):
        return self._counts

    def bits(self):
        return self._bits

    def _compute_score(self):
        return sum(self._counts) + sum(self._bits)

    def _dominates(self, other):
        return (all(a >= b for a, b in zip(self._counts, other._counts))
                and all(a or not b for a, b in zip(self._bits, other._bits)))

    def _meet(self, other):
        return PlainVector(
            [min(a, b) for a, b in zip(self._counts, other._counts)],
            [a and b for a, b in zip(self._bits, other._bits)],
            self.k,
        )

    def _dec_if(self, count_mask, bit_mask):
        return PlainVector(
            [max(c - int(m), -1) for c, m in zip(self._counts, count_mask)],
            [b and not m for b, m in zip(self._bits, bit_mask)],
            self.k,
        )


class LaneVector(StateVector):
    """Counted entries followed by the bits as 0/1, in one read-only lane row.

    The row is the vector's key, so batches of lane vectors stack into a
    matrix on which the downset and solver operate directly.
    """

    __slots__ = ("_row",)

    def __init__(self, row: np.ndarray, num_counted: int, k: int):
        super().__init__((num_counted, len(row) - num_counted, k))
        row.setflags(write=False)
        self._row = row

    @classmethod
    def from_values(cls, counts: Sequence[int], bits: Sequence[bool], k: int) -> "LaneVector":
        row = np.asarray(list(counts) + [int(bool(b)) for b in bits], dtype=lane_dtype(k))
        return cls(row, len(counts), k)

    @property
    def _counts(self) -> np.ndarray:
        return self._row[:self.shape[0]]

    @property
    def _bits(self) -> np.ndarray:
        return self._row[self.shape[0]:]

    def counted(self):
        return tuple(self._counts.tolist())

    def bits(self):
        return tuple(bool(b) for b in self._bits.tolist())

    def key(self):
        if self._key is None:
            self._key = tuple(self._row.tolist())
        return self._key

    def _compute_score(self):
        return int(self._row.sum(dtype=np.int64))

    def _dominates(self, other):
        return bool(np.all(self._row >= other._row))

    def _meet(self, other):
        return LaneVector(np.minimum(self._row, other._row), self.shape[0], self.k)

    def _dec_if(self, count_mask, bit_mask):
        dtype = self._row.dtype
        mask = np.asarray(list(count_mask) + list(bit_mask), dtype=dtype)
        floor = np.zeros(len(mask), dtype=dtype)
        floor[:self.shape[0]] = -1
        return LaneVector(np.maximum(self._row - mask, floor), self.shape[0], self.k)

    def __hash__(self):
        return hash((self.shape, self._row.tobytes()))


# One bwd step for a fixed io-action: maps a vector to its backward image.
StepFn = Callable[[StateVector], StateVector]


def _gather(groups, dtype):
    """Flatten per-target (index, dec) groups for reduceat.

    Returns the targets with a non-empty group, the start offset of each
    group, and the concatenated source indices and decrements.
    """
    targets, starts, idx, dec = [], [], [], []
    for i, group in enumerate(groups):
        if group:
            targets.append(i)
            starts.append(len(idx))
            for j, d in group:
                idx.append(j)
                dec.append(d)
    return (np.asarray(targets, dtype=np.intp), np.asarray(starts, dtype=np.intp),
            np.asarray(idx, dtype=np.intp), np.asarray(dec, dtype=dtype))


class LaneStep:
    """Backward image of one io-action over a matrix of lane rows.

    Every row is stepped by one gather, one saturating subtract and one
    `np.minimum.reduceat` along the rows.
    """

    def __init__(self, space: "VectorSpace", count_groups, bit_from_counts, bit_from_bits):
        self.space = space
        self.dtype = space.dtype
        self.num_counted = len(count_groups)
        self.num_bits = len(bit_from_bits)
        self.c_targets, self.c_starts, self.c_idx, self.c_dec = _gather(count_groups, self.dtype)
        self.bc_targets, self.bc_starts, self.bc_idx, self.bc_dec = _gather(bit_from_counts, self.dtype)
        self.bb_targets, self.bb_starts, bb_idx, _ = _gather(
            [[(j, 0) for j in group] for group in bit_from_bits], self.dtype)
        self.bb_idx = bb_idx + self.num_counted

    def batch(self, rows: np.ndarray) -> np.ndarray:
        m = rows.shape[0]
        out = np.empty((m, self.num_counted + self.num_bits), dtype=self.dtype)
        if m == 0:
            return out
        counts = out[:, :self.num_counted]
        counts.fill(self.space.k)
        if len(self.c_idx):
            vals = rows[:, self.c_idx] - self.c_dec
            np.maximum(vals, self.dtype(-1), out=vals)
            counts[:, self.c_targets] = np.minimum.reduceat(vals, self.c_starts, axis=1)
        bits = np.ones((m, self.num_bits), dtype=bool)
        if len(self.bc_idx):
            ok = rows[:, self.bc_idx] >= self.bc_dec
            bits[:, self.bc_targets] &= np.logical_and.reduceat(ok, self.bc_starts, axis=1)
        if len(self.bb_idx):
            ok = rows[:, self.bb_idx] > 0
            bits[:, self.bb_targets] &= np.logical_and.reduceat(ok, self.bb_starts, axis=1)
        out[:, self.num_counted:] = bits
        return out

    def __call__(self, v: StateVector) -> StateVector:
        return self.space.from_row(self.batch(v._row[np.newaxis, :])[0])


class VectorSpace:
    def __init__(self, num_states: int, k: int, boolean_states: Iterable[int] = (),
                 lanes: bool = False):
        """Fix the layout of vectors over an automaton.

        Args:
            num_states: Number of automaton states
            k: Ceiling of every counted entry
            boolean_states: States stored as one bit
            lanes: Use numpy lane vectors instead of tuples
        """
        if k < 1:
            raise UsageError(f"k must be positive, got {k}")
        self.k = k
        self.num_states = num_states
        self.lanes = lanes
        if lanes:
            self.dtype = lane_dtype(k)

        boolean = set(boolean_states)
        self.boolean_states = sorted(boolean)
        self.counted_states = [q for q in range(num_states) if q not in boolean]
        # state -> (is_bit, slot index)
        self.slot: Dict[int, Tuple[bool, int]] = {}
        for i, q in enumerate(self.counted_states):
            self.slot[q] = (False, i)
        for i, q in enumerate(self.boolean_states):
            self.slot[q] = (True, i)

        self.shape = (len(self.counted_states), len(self.boolean_states), k)
        self.backend = VectorBackend.of(lanes, bool(self.boolean_states))

    def make(self, counts: Sequence[int], bits: Sequence[bool] = ()) -> StateVector:
        """Vector from raw slot contents."""
        if len(counts) != self.shape[0] or len(bits) != self.shape[1]:
            raise UsageError(f"slot contents do not match shape {self.shape}")
        for c in counts:
            if not -1 <= c <= self.k:
                raise UsageError(f"entry {c} outside [-1, {self.k}]")
        if self.lanes:
            return LaneVector.from_values(counts, bits, self.k)
        return PlainVector(counts, bits, self.k)

    def vector(self, values: Sequence[int]) -> StateVector:
        """Vector from one value per state; a boolean state keeps value >= 0."""
        if len(values) != self.num_states:
            raise UsageError(f"expected {self.num_states} values, got {len(values)}")
        counts = [values[q] for q in self.counted_states]
        bits = [values[q] >= 0 for q in self.boolean_states]
        return self.make(counts, bits)

    def values(self, v: StateVector) -> List[int]:
        """Per-state reading of v; a set bit reads as k, a cleared one as -1."""
        counts, bits = v.counted(), v.bits()
        out = []
        for q in range(self.num_states):
            is_bit, i = self.slot[q]
            out.append((self.k if bits[i] else -1) if is_bit else counts[i])
        return out

    def top(self) -> StateVector:
        return self.make([self.k] * self.shape[0], [True] * self.shape[1])

    def bottom(self) -> StateVector:
        return self.make([-1] * self.shape[0], [False] * self.shape[1])

    def witness(self, q0: int) -> StateVector:
        """Least vector with q0 >= 0: q0 maps to 0, everything else to -1."""
        values = [-1] * self.num_states
        values[q0] = 0
        return self.vector(values)

    def compile_step(self, pairs: Iterable[Tuple[int, int, int]]) -> StepFn:
        """Compile the backward image of an io-action.

        Entry p of the image is the minimum of max(v_q - dec, -1) over the
        pairs (p, q, dec), or k when p has no pair. A boolean source keeps
        its bit iff every pair satisfies v_q - dec >= 0.
        """
        count_groups: List[List[Tuple[int, int]]] = [[] for _ in self.counted_states]
        bit_from_counts: List[List[Tuple[int, int]]] = [[] for _ in self.boolean_states]
        bit_from_bits: List[List[int]] = [[] for _ in self.boolean_states]
        for p, q, dec in pairs:
            p_bit, i = self.slot[p]
            q_bit, j = self.slot[q]
            if not p_bit:
                if q_bit:
                    raise UsageError(f"counted state {p} has a boolean successor {q}")
                count_groups[i].append((j, dec))
            elif q_bit:
                bit_from_bits[i].append(j)
            else:
                bit_from_counts[i].append((j, dec))
        if self.lanes:
            return LaneStep(self, count_groups, bit_from_counts, bit_from_bits)
        return self._plain_step(count_groups, bit_from_counts, bit_from_bits)

    def _plain_step(self, count_groups, bit_from_counts, bit_from_bits) -> StepFn:
        k = self.k

        def step(v: StateVector) -> StateVector:
            counts, bits = v.counted(), v.bits()
            new_counts = [
                min((max(counts[j] - dec, -1) for j, dec in group), default=k)
                for group in count_groups
            ]
            new_bits = [
                all(counts[j] >= dec for j, dec in from_counts) and all(bits[j] for j in from_bits)
                for from_counts, from_bits in zip(bit_from_counts, bit_from_bits)
            ]
            return PlainVector(new_counts, new_bits, k)

        return step

    def from_row(self, row: np.ndarray) -> "LaneVector":
        """Lane vector over an existing row; the row becomes read-only."""
        return LaneVector(row, self.shape[0], self.k)

    def stack(self, vectors: Sequence[StateVector]) -> np.ndarray:
        """Lane vectors as the rows of one matrix."""
        if not self.lanes:
            raise UsageError("row matrices need a lane vector space")
        if not vectors:
            return np.empty((0, self.shape[0] + self.shape[1]), dtype=self.dtype)
        return np.stack([v._row for v in vectors])

    def __repr__(self):
        return f"VectorSpace(states={self.num_states}, k={self.k}, backend={self.backend.value})"
