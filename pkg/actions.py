import logging
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from automaton import Automaton, Transition
from bool_engine import BoolEngine, BoolFn
from errors import UsageError

logger = logging.getLogger(__name__)

# (src, dst, dec) with dec = 1 iff dst is a Büchi state
Pair = Tuple[int, int, int]


class InputSelection(str, Enum):
    PURE = "pure"
    REFINED = "refined"


class IOAction:
    """The transition pairs an IO is compatible with.

    Pairs are either given up front or computed from the automaton on first
    access.
    """

    __slots__ = ("label", "_pairs", "_automaton")

    def __init__(self, label: BoolFn, pairs: Sequence[Pair] = None, automaton: Automaton = None):
        if pairs is None and automaton is None:
            raise UsageError("an IOAction needs its pairs or an automaton to compute them from")
        self.label = label
        self._pairs = tuple(sorted(set(pairs))) if pairs is not None else None
        self._automaton = automaton

    @property
    def materialized(self) -> bool:
        return self._pairs is not None

    @property
    def pairs(self) -> Tuple[Pair, ...]:
        if self._pairs is None:
            self._pairs = _scan_pairs(self._automaton, self.label)
            self._automaton = None
        return self._pairs

    def pair_set(self) -> FrozenSet[Pair]:
        return frozenset(self.pairs)

    def __repr__(self):
        state = f"{len(self._pairs)} pairs" if self._pairs is not None else "lazy"
        return f"IOAction({state})"


class InputAction:
    """The io-actions of every sufficient IO compatible with one input."""

    __slots__ = ("input", "_ioactions", "_dedup")

    def __init__(self, input: BoolFn, ioactions: Sequence[IOAction], dedup: bool = False):
        self.input = input
        self._ioactions = list(ioactions)
        self._dedup = dedup

    @property
    def ioactions(self) -> List[IOAction]:
        if self._dedup:
            seen: Set[FrozenSet[Pair]] = set()
            kept = []
            for a in self._ioactions:
                pairs = a.pair_set()
                if pairs not in seen:
                    seen.add(pairs)
                    kept.append(a)
            self._ioactions = kept
            self._dedup = False
        return self._ioactions

    def __repr__(self):
        return f"InputAction({len(self._ioactions)} io-actions)"


def _scan_pairs(automaton: Automaton, x: BoolFn) -> Tuple[Pair, ...]:
    engine = automaton.engine
    pairs = {
        (t.src, t.dst, int(t.dst in automaton.buchi))
        for t in automaton.transitions
        if engine.compatible(x, t.label)
    }
    return tuple(sorted(pairs))


def ioact(automaton: Automaton, x: BoolFn) -> IOAction:
    """Materialized io-action of x: every (p, q) with a transition whose label meets x."""
    if automaton.engine.is_false(x):
        raise UsageError("ioact of the false IO is undefined")
    return IOAction(x, _scan_pairs(automaton, x))


def _refine(engine: BoolEngine, labels: Sequence[BoolFn],
            tags: bool = False) -> Tuple[List[BoolFn], List[Set[int]]]:
    """Partition refinement of the true function by each label in turn.

    For every current block y meeting label x, y becomes x & y in place and
    !x & y is appended when nonempty. With `tags`, each block also records the
    indices of the labels it lies inside.
    """
    blocks: List[BoolFn] = [engine.true]
    inside: List[Set[int]] = [set()]
    for n, x in enumerate(labels):
        for idx in range(len(blocks)):
            y = blocks[idx]
            xy = y & x
            if engine.is_false(xy):
                continue
            rest = y & ~x
            blocks[idx] = xy
            if not engine.is_false(rest):
                blocks.append(rest)
                if tags:
                    inside.append(set(inside[idx]))
            if tags:
                inside[idx].add(n)
    return blocks, inside


def sufficient_terminal_ios(engine: BoolEngine, labels: Sequence[BoolFn]) -> List[BoolFn]:
    """Terminal IOs covering every io-action of a pure IO."""
    blocks, _ = _refine(engine, labels)
    return blocks


def _distinct_labels(automaton: Automaton) -> Tuple[List[BoolFn], List[List[Transition]]]:
    engine = automaton.engine
    index: Dict[int, int] = {}
    labels: List[BoolFn] = []
    edges: List[List[Transition]] = []
    for t in automaton.transitions:
        fp = engine.fingerprint(t.label)
        if fp not in index:
            index[fp] = len(labels)
            labels.append(t.label)
            edges.append([])
        edges[index[fp]].append(t)
    return labels, edges


def _terminal_inputs(automaton: Automaton, ios: Sequence[BoolFn]) -> List[BoolFn]:
    engine = automaton.engine
    projected = []
    seen = set()
    for x in ios:
        p = engine.exists(x, automaton.outputs)
        if engine.fingerprint(p) not in seen:
            seen.add(engine.fingerprint(p))
            projected.append(p)
    return sufficient_terminal_ios(engine, projected)


def _group(automaton: Automaton, ios: Sequence[IOAction]) -> List[InputAction]:
    engine = automaton.engine
    inputs = _terminal_inputs(automaton, [a.label for a in ios])
    return [
        InputAction(i, [a for a in ios if engine.compatible(i, a.label)], dedup=True)
        for i in inputs
    ]


def _pure_actions(automaton: Automaton, materialize: bool) -> List[InputAction]:
    engine = automaton.engine
    result = []
    for icube in engine.enumerate_pure(engine.true, automaton.inputs):
        i = engine.cube_fn(icube)
        ioactions = []
        for ocube in engine.enumerate_pure(engine.true, automaton.outputs):
            x = i & engine.cube_fn(ocube)
            ioactions.append(ioact(automaton, x) if materialize else IOAction(x, automaton=automaton))
        result.append(InputAction(i, ioactions))
    return result


def sufficient_inputs(automaton: Automaton, mode=InputSelection.REFINED) -> List[InputAction]:
    """Input-actions to iterate cpre over; io-action pairs are computed lazily."""
    mode = InputSelection(mode)
    if mode is InputSelection.PURE:
        return _pure_actions(automaton, materialize=False)
    labels, _ = _distinct_labels(automaton)
    ios = sufficient_terminal_ios(automaton.engine, labels)
    return _group(automaton, [IOAction(x, automaton=automaton) for x in ios])


def precompute(automaton: Automaton, mode=InputSelection.REFINED) -> List[InputAction]:
    """Like sufficient_inputs, with every pair list materialized up front.

    In refined mode the pairs are collected during the refinement itself:
    each terminal IO lies inside or outside every edge label, so its pairs
    are the edges of the labels it was tagged with.
    """
    mode = InputSelection(mode)
    if mode is InputSelection.PURE:
        return _pure_actions(automaton, materialize=True)
    labels, edges = _distinct_labels(automaton)
    blocks, inside = _refine(automaton.engine, labels, tags=True)
    ioactions = []
    for x, tags in zip(blocks, inside):
        pairs = [
            (t.src, t.dst, int(t.dst in automaton.buchi))
            for n in tags
            for t in edges[n]
        ]
        ioactions.append(IOAction(x, pairs))
    return _group(automaton, ioactions)


def build_actions(automaton: Automaton, mode=InputSelection.REFINED,
                  materialize: bool = True) -> List[InputAction]:
    actions = precompute(automaton, mode) if materialize else sufficient_inputs(automaton, mode)
    logger.debug("%s input selection: %d input-actions, %d io-actions",
                 InputSelection(mode).value, len(actions),
                 sum(len(ia._ioactions) for ia in actions))
    return actions


def describe_actions(automaton: Automaton, actions: Sequence[InputAction],
                     names: Optional[Dict[str, str]] = None) -> str:
    """Terminal inputs and their IOs as formula strings, one per line."""
    engine = automaton.engine
    lines = []
    for n, ia in enumerate(actions):
        lines.append(f"input {n}: {engine.to_formula(ia.input, names)}")
        for a in ia.ioactions:
            pairs = " ".join(f"{p}->{q}{'*' if dec else ''}" for p, q, dec in a.pairs)
            lines.append(f"  io {engine.to_formula(a.label, names)}: {pairs or '(no pairs)'}")
    return "\n".join(lines)
