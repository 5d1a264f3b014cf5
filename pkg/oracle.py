"""Brute-force reference semantics for tests.

Nothing here touches the solver, downset or actions modules: vectors are
plain tuples on the explicit grid [-1, k]^Q and IOs are enumerated as total
assignments.
"""

import itertools
import logging
from typing import Dict, FrozenSet, Iterable, List, Set, Tuple

from automaton import Automaton
from errors import OracleTooBig

logger = logging.getLogger(__name__)

GRID_LIMIT = 10 ** 6
VARIABLE_LIMIT = 8

Vec = Tuple[int, ...]


def _assignments(names: List[str]) -> Iterable[Dict[str, bool]]:
    for values in itertools.product((False, True), repeat=len(names)):
        yield dict(zip(names, values))


def _check_variables(automaton: Automaton):
    count = len(automaton.inputs) + len(automaton.outputs)
    if count > VARIABLE_LIMIT:
        raise OracleTooBig(f"{count} variables exceed the oracle limit of {VARIABLE_LIMIT}")


def _pure_io_edges(automaton: Automaton) -> List[List[List[Tuple[int, int]]]]:
    """edges[i][o] = transitions (src, dst) enabled by pure input i and output o."""
    engine = automaton.engine
    in_names = [v.name for v in automaton.inputs]
    out_names = [v.name for v in automaton.outputs]
    table = []
    for ivals in _assignments(in_names):
        row = []
        for ovals in _assignments(out_names):
            point = {**ivals, **ovals}
            row.append([(t.src, t.dst) for t in automaton.transitions
                        if engine.evaluate(t.label, point)])
        table.append(row)
    return table


def oracle_pure_ioacts(automaton: Automaton) -> Set[FrozenSet[Tuple[int, int]]]:
    """The distinct io-actions of all pure IOs, as (src, dst) pair sets."""
    _check_variables(automaton)
    return {frozenset(pairs) for row in _pure_io_edges(automaton) for pairs in row}


def _close_downward(vectors: Set[Vec]) -> Set[Vec]:
    closed = set(vectors)
    frontier = list(vectors)
    while frontier:
        v = frontier.pop()
        for j, value in enumerate(v):
            if value > -1:
                w = v[:j] + (value - 1,) + v[j + 1:]
                if w not in closed:
                    closed.add(w)
                    frontier.append(w)
    return closed


def _step_back(v: Vec, pairs: List[Tuple[int, int]], buchi, n: int, k: int) -> Vec:
    out = []
    for p in range(n):
        values = [max(v[q] - (1 if q in buchi else 0), -1) for src, q in pairs if src == p]
        out.append(min(values) if values else k)
    return tuple(out)


def oracle_solve(automaton: Automaton, k: int) -> bool:
    """cpre* on the explicit grid, iterating every pure input until stable."""
    n = automaton.num_states
    if (k + 2) ** n > GRID_LIMIT:
        raise OracleTooBig(f"grid of (k+2)^|Q| = {(k + 2) ** n} vectors exceeds {GRID_LIMIT}")
    _check_variables(automaton)
    table = _pure_io_edges(automaton)
    buchi = automaton.buchi

    S: Set[Vec] = set(itertools.product(range(-1, k + 1), repeat=n))
    changed = True
    while changed:
        changed = False
        for row in table:
            images: Set[Vec] = set()
            for pairs in row:
                images |= {_step_back(v, pairs, buchi, n, k) for v in S}
            new_S = S & _close_downward(images)
            if new_S != S:
                S = new_S
                changed = True

    q0 = automaton.initial
    return any(v[q0] >= 0 for v in S)
