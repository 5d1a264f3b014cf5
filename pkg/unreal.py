import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from automaton import Automaton, build_automaton
from bool_engine import BoolFn
from solver import SolveConfig, Solver

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ShiftedState:
    """A source state together with the output still owed to it."""

    base: int
    pending: BoolFn = field(compare=False)
    fingerprint: int = 0


class OutputShifter:
    """Delays every output by one transition and swaps the players.

    From a state (p, o) and a source edge (p, x, q), the label x is consumed
    slice by slice: pick the least pure output o' meeting the rest y, take
    the input slice i = Exists O. (y & o'), move on o & i to (q, o'') with
    o'' = Exists I. (i & y), and continue with y & !i.
    """

    def __init__(self, automaton: Automaton):
        self.source = automaton
        self.engine = automaton.engine
        self.states: List[ShiftedState] = []
        self._index: Dict[Tuple[int, int], int] = {}
        self._edges: List[Tuple[int, BoolFn, int]] = []
        # (shifted state, source transition index, input slice)
        self.slices: List[Tuple[int, int, BoolFn]] = []
        self._result: Optional[Automaton] = None

    def _state(self, base: int, pending: BoolFn, queue: deque) -> int:
        key = (base, self.engine.fingerprint(pending))
        if key not in self._index:
            self._index[key] = len(self.states)
            self.states.append(ShiftedState(base, pending, key[1]))
            queue.append(self._index[key])
        return self._index[key]

    def shift(self) -> Automaton:
        if self._result is not None:
            return self._result
        A, engine = self.source, self.engine
        queue: deque = deque()
        self._state(A.initial, engine.true, queue)
        processed = set()

        while queue:
            n = queue.popleft()
            assert n not in processed, f"shifted state {n} processed twice"
            processed.add(n)
            state = self.states[n]
            for m, t in enumerate(A.transitions):
                if t.src != state.base:
                    continue
                y = t.label
                while not engine.is_false(y):
                    o_prime = engine.cube_fn(engine.some_pure(y, A.outputs))
                    i = engine.exists(y & o_prime, A.outputs)
                    o_next = engine.exists(i & y, A.inputs)
                    dst = self._state(t.dst, o_next, queue)
                    self._edges.append((n, state.pending & i, dst))
                    self.slices.append((n, m, i))
                    y = y & ~i

        buchi = [n for n, s in enumerate(self.states) if s.base in A.buchi]
        names = [
            f"{A.state_names[s.base] if A.state_names else s.base}/{engine.to_formula(s.pending)}"
            for s in self.states
        ]
        self._result = build_automaton(
            engine, len(self.states), 0, self._edges, buchi,
            inputs=A.outputs, outputs=A.inputs, state_names=names,
        )
        logger.debug("Output shifting: %d states -> %d states, %d transitions",
                     A.num_states, self._result.num_states, len(self._result.transitions))
        return self._result

    def pending_formulas(self) -> List[str]:
        """Pending output of each shifted state, for HOA comments."""
        self.shift()
        return [self.engine.to_formula(s.pending) for s in self.states]


def shift_outputs(automaton: Automaton) -> Automaton:
    return OutputShifter(automaton).shift()


def check_unreal(negated: Automaton, cfg: SolveConfig = None, cancel=None) -> bool:
    """Whether the environment wins: BackwardRealizability of the shifted,
    role-swapped automaton recognizing the specification itself."""
    return Solver(shift_outputs(negated), cfg, cancel).run().realizable
