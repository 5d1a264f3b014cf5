import logging
from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from bool_engine import BoolEngine, BoolFn, VarId
from errors import UsageError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Transition:
    src: int
    label: BoolFn
    dst: int


@dataclass(frozen=True)
class Automaton:
    """A Büchi automaton over a partitioned input/output alphabet.

    `inputs` and `outputs` give the role each variable plays in the game; a
    role-swapped automaton lists declared outputs as its inputs.
    """

    engine: BoolEngine = field(compare=False, repr=False)
    num_states: int
    initial: int
    transitions: Tuple[Transition, ...]
    buchi: FrozenSet[int]
    inputs: Tuple[VarId, ...]
    outputs: Tuple[VarId, ...]
    state_names: Optional[Tuple[str, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        if not 0 <= self.initial < self.num_states:
            raise UsageError(f"initial state {self.initial} out of range")
        for q in self.buchi:
            if not 0 <= q < self.num_states:
                raise UsageError(f"Büchi state {q} out of range")
        for t in self.transitions:
            if not (0 <= t.src < self.num_states and 0 <= t.dst < self.num_states):
                raise UsageError(f"transition {t.src}->{t.dst} leaves the state set")
            if self.engine.is_false(t.label):
                raise UsageError(f"transition {t.src}->{t.dst} is labeled false")

    @property
    def states(self) -> range:
        return range(self.num_states)

    def successors(self, q: int) -> List[int]:
        return [t.dst for t in self.transitions if t.src == q]

    def adjacency(self) -> List[List[int]]:
        adj: List[List[int]] = [[] for _ in self.states]
        for t in self.transitions:
            if t.dst not in adj[t.src]:
                adj[t.src].append(t.dst)
        return adj


def build_automaton(engine: BoolEngine, num_states: int, initial: int,
                    edges: Iterable[Tuple[int, BoolFn, int]], buchi: Iterable[int],
                    inputs: Sequence[VarId] = None, outputs: Sequence[VarId] = None,
                    state_names: Sequence[str] = None) -> Automaton:
    """Assemble an automaton, dropping edges whose label is false."""
    transitions = []
    for src, label, dst in edges:
        if engine.is_false(label):
            logger.warning("Dropping edge %d -> %d labeled false", src, dst)
            continue
        transitions.append(Transition(src, label, dst))
    return Automaton(
        engine=engine,
        num_states=num_states,
        initial=initial,
        transitions=tuple(transitions),
        buchi=frozenset(buchi),
        inputs=tuple(engine.inputs if inputs is None else inputs),
        outputs=tuple(engine.outputs if outputs is None else outputs),
        state_names=tuple(state_names) if state_names is not None else None,
    )


# -- strongly connected components ---------------------------------------

@dataclass(frozen=True)
class Component:
    states: FrozenSet[int]
    nontrivial: bool


def sccs(automaton: Automaton) -> List[Component]:
    """Tarjan's algorithm with an explicit stack.

    Components come out in reverse topological order of the condensation.
    Labels are ignored: every transition is an edge.
    """
    adj = automaton.adjacency()
    n = automaton.num_states
    index = [-1] * n
    lowlink = [0] * n
    on_stack = [False] * n
    stack: List[int] = []
    result: List[Component] = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        iter_stack = [(root, 0)]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True

        while iter_stack:
            v, child = iter_stack[-1]
            if child < len(adj[v]):
                iter_stack[-1] = (v, child + 1)
                w = adj[v][child]
                if index[w] == -1:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    iter_stack.append((w, 0))
                elif on_stack[w]:
                    lowlink[v] = min(lowlink[v], index[w])
                continue

            iter_stack.pop()
            if iter_stack:
                parent = iter_stack[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                members = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    members.append(w)
                    if w == v:
                        break
                nontrivial = len(members) > 1 or v in adj[v]
                result.append(Component(frozenset(members), nontrivial))

    return result


def reachable_from(automaton: Automaton, sources: Iterable[int]) -> Set[int]:
    """States reachable from `sources`, the sources included."""
    adj = automaton.adjacency()
    seen = set(sources)
    queue = deque(seen)
    while queue:
        q = queue.popleft()
        for r in adj[q]:
            if r not in seen:
                seen.add(r)
                queue.append(r)
    return seen


def bounded_states(automaton: Automaton) -> Set[int]:
    """States that no Büchi state lying in a nontrivial SCC can reach."""
    looping_buchi = set()
    for component in sccs(automaton):
        if component.nontrivial:
            looping_buchi |= component.states & automaton.buchi
    return set(automaton.states) - reachable_from(automaton, looping_buchi)


# -- boolean / counted split ----------------------------------------------

class SplitMode(str, Enum):
    NONE = "none"
    BOUNDED = "bounded"


@dataclass(frozen=True)
class StateSplit:
    boolean_states: Tuple[int, ...]
    counted_states: Tuple[int, ...]


def split_boolean(automaton: Automaton, mode: SplitMode = SplitMode.BOUNDED) -> StateSplit:
    """Partition the states into one-bit and integer-valued ones.

    In bounded mode the boolean states are the bounded states that no Büchi
    state reaches. That set is closed under predecessors and holds no Büchi
    state, so a predecessor only ever asks a boolean state "is your value
    nonnegative?" and the bit answers exactly.
    """
    mode = SplitMode(mode)
    if mode is SplitMode.NONE:
        boolean: Set[int] = set()
    else:
        boolean = bounded_states(automaton) - reachable_from(automaton, automaton.buchi)
    counted = [q for q in automaton.states if q not in boolean]
    logger.debug("Boolean split: %d boolean, %d counted", len(boolean), len(counted))
    return StateSplit(tuple(sorted(boolean)), tuple(counted))


def preprocess(automaton: Automaton, remove_surely_losing: bool = False) -> Automaton:
    """Hook for removing useless states before solving.

    Surely-losing state removal is not implemented; the flag is accepted and
    the automaton is returned as is.
    """
    if remove_surely_losing:
        logger.warning("Surely-losing state removal is reserved; automaton left unchanged")
    return replace(automaton)
