"""Automata used by the tests, the samples and the benchmark.

Every generator is seeded. Paired instances carry an automaton of the
negated specification (`aut`, solved for realizability) and one of the
specification itself (`neg_aut`, fed to the unrealizability check), plus
the verdict known by construction.
"""

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from automaton import Automaton, build_automaton
from bool_engine import BoolEngine, BoolFn
from errors import UsageError
from pipeline import Verdict


# -- canonical small automata --------------------------------------------

def a_loop(inputs=("i",), outputs=("o",)) -> Automaton:
    """One Büchi state with a true self-loop; unrealizable at every k."""
    engine = BoolEngine(inputs, outputs)
    return build_automaton(engine, 1, 0, [(0, engine.true, 0)], {0})


def a_bool() -> Automaton:
    """q0 -> q1, q1 -> q1, B = {q1}."""
    engine = BoolEngine(["i"], ["o"])
    return build_automaton(engine, 2, 0, [(0, engine.true, 1), (1, engine.true, 1)], {1})


def a_real() -> Automaton:
    """Labels i&o and !i&!o on a q0 self-loop, no Büchi state."""
    engine = BoolEngine(["i"], ["o"])
    i, o = engine.mk_var("i"), engine.mk_var("o")
    return build_automaton(engine, 1, 0, [(0, i & o, 0), (0, ~i & ~o, 0)], set())


def a_passing_buchi() -> Automaton:
    """q0 -> q1 (Büchi) -> q2 with a loop on q2; realizable for every k >= 1."""
    engine = BoolEngine(["i"], ["o"])
    t = engine.true
    return build_automaton(engine, 3, 0, [(0, t, 1), (1, t, 2), (2, t, 2)], {1})


def a_split_outputs() -> Automaton:
    """Edges labeled i&o1 and i&!o1 over outputs o1, o2."""
    engine = BoolEngine(["i"], ["o1", "o2"])
    i, o1 = engine.mk_var("i"), engine.mk_var("o1")
    return build_automaton(engine, 2, 0, [(0, i & o1, 1), (0, i & ~o1, 0)], {1})


def a_single_edge() -> Automaton:
    """The lone edge (q0, i&o, q1)."""
    engine = BoolEngine(["i"], ["o"])
    i, o = engine.mk_var("i"), engine.mk_var("o")
    return build_automaton(engine, 2, 0, [(0, i & o, 1)], set())


def a_unused_inputs(num_inputs: int = 2) -> Automaton:
    """A true Büchi self-loop over inputs the label never mentions."""
    return a_loop(inputs=[f"i{n}" for n in range(num_inputs)], outputs=())


# -- random automata -----------------------------------------------------

def _random_label(engine: BoolEngine, names: Sequence[str], rng: np.random.Generator,
                  density: float) -> BoolFn:
    """Disjunction of a random subset of the full assignments."""
    label = engine.false
    for values in itertools.product((False, True), repeat=len(names)):
        if rng.random() < density:
            label = label | engine.cube_fn({engine.lookup(n): v for n, v in zip(names, values)})
    return label


def random_automaton(rng: np.random.Generator, num_states: int, num_inputs: int,
                     num_outputs: int, edge_prob: float = 0.4, label_density: float = 0.5,
                     buchi_prob: float = 0.3) -> Automaton:
    inputs = [f"i{n}" for n in range(num_inputs)]
    outputs = [f"o{n}" for n in range(num_outputs)]
    engine = BoolEngine(inputs, outputs)
    names = inputs + outputs
    edges = []
    for p in range(num_states):
        for q in range(num_states):
            if rng.random() < edge_prob:
                label = _random_label(engine, names, rng, label_density)
                if not engine.is_false(label):
                    edges.append((p, label, q))
    buchi = {q for q in range(num_states) if rng.random() < buchi_prob}
    return build_automaton(engine, num_states, 0, edges, buchi)


def random_corpus(seed: int, count: int, max_states: int = 5, max_inputs: int = 2,
                  max_outputs: int = 2) -> List[Automaton]:
    rng = np.random.default_rng(seed)
    corpus = []
    for _ in range(count):
        corpus.append(random_automaton(
            rng,
            num_states=int(rng.integers(1, max_states + 1)),
            num_inputs=int(rng.integers(0, max_inputs + 1)),
            num_outputs=int(rng.integers(0, max_outputs + 1)),
            edge_prob=float(rng.uniform(0.2, 0.8)),
            label_density=float(rng.uniform(0.2, 0.8)),
            buchi_prob=float(rng.uniform(0.0, 0.6)),
        ))
    return corpus


def tradeoff_automaton(num_states: int, num_outputs: int = 4) -> Automaton:
    """Gadgets in which every output value costs some run a Büchi visit.

    State 0 branches into gadgets of four states x, bx, y, by (bx and by
    Büchi). Output o_j, with j the gadget index modulo `num_outputs`, sends
    x to bx and keeps y; its negation keeps x and sends y to by; bx and by
    return unconditionally. Gadgets sharing an output move in lockstep, so
    the antichains are about 2**num_outputs wide whatever the size.
    Leftover states form a safe chain. Unrealizable at every k; for
    benchmarking.
    """
    if num_states < 5:
        raise UsageError("a trade-off automaton needs at least 5 states")
    engine = BoolEngine(["i"], [f"o{n}" for n in range(num_outputs)])
    t = engine.true
    edges = []
    buchi = set()
    gadgets = (num_states - 1) // 4
    for g in range(gadgets):
        x, bx, y, by = 1 + 4 * g, 2 + 4 * g, 3 + 4 * g, 4 + 4 * g
        o = engine.mk_var(f"o{g % num_outputs}")
        edges += [(0, t, x), (0, t, y),
                  (x, o, bx), (x, ~o, x), (bx, t, x),
                  (y, ~o, by), (y, o, y), (by, t, y)]
        buchi |= {bx, by}
    for q in range(1 + 4 * gadgets, num_states):
        edges.append((q, t, min(q + 1, num_states - 1)))
    return build_automaton(engine, num_states, 0, edges, buchi)


# -- paired corpus -------------------------------------------------------

@dataclass
class PairedInstance:
    name: str
    aut: Automaton
    neg_aut: Automaton
    expected: Verdict


def _pair(name: str, engine: BoolEngine, aut: Tuple, neg: Tuple, expected: Verdict) -> PairedInstance:
    return PairedInstance(
        name,
        build_automaton(engine, *aut),
        build_automaton(engine, *neg),
        expected,
    )


def hand_pairs() -> List[PairedInstance]:
    """Small specifications whose winner is known."""
    pairs = []

    e = BoolEngine(["i"], ["o"])
    i, o, t = e.mk_var("i"), e.mk_var("o"), e.true
    same = (i & o) | (~i & ~o)
    # G(o <-> i)
    pairs.append(_pair("copy", e,
                       (2, 0, [(0, same, 0), (0, ~same, 1), (1, t, 1)], {1}),
                       (1, 0, [(0, same, 0)], {0}),
                       Verdict.REALIZABLE))

    e = BoolEngine(["i"], ["o"])
    i, o, t = e.mk_var("i"), e.mk_var("o"), e.true
    # G(i -> o)
    pairs.append(_pair("response", e,
                       (2, 0, [(0, ~i | o, 0), (0, i & ~o, 1), (1, t, 1)], {1}),
                       (1, 0, [(0, ~i | o, 0)], {0}),
                       Verdict.REALIZABLE))

    e = BoolEngine(["i"], ["o"])
    i, o, t = e.mk_var("i"), e.mk_var("o"), e.true
    # GF o
    pairs.append(_pair("infinitely-often-output", e,
                       (2, 0, [(0, t, 0), (0, ~o, 1), (1, ~o, 1)], {1}),
                       (2, 0, [(0, ~o, 0), (0, o, 1), (1, o, 1), (1, ~o, 0)], {1}),
                       Verdict.REALIZABLE))

    e = BoolEngine(["i"], ["o"])
    i, o, t = e.mk_var("i"), e.mk_var("o"), e.true
    # G !i
    pairs.append(_pair("forbidden-input", e,
                       (2, 0, [(0, ~i, 0), (0, i, 1), (1, t, 1)], {1}),
                       (1, 0, [(0, ~i, 0)], {0}),
                       Verdict.UNREALIZABLE))

    e = BoolEngine(["i"], ["o"])
    t = e.true
    # false
    pairs.append(_pair("unsatisfiable", e,
                       (1, 0, [(0, t, 0)], {0}),
                       (1, 0, [(0, t, 0)], set()),
                       Verdict.UNREALIZABLE))

    e = BoolEngine(["i"], ["o"])
    i, o, t = e.mk_var("i"), e.mk_var("o"), e.true
    # GF o & G(i -> !o)
    pairs.append(_pair("forced-violation", e,
                       (3, 0, [(0, t, 0), (0, ~o, 1), (1, ~o, 1), (0, i & o, 2), (2, t, 2)], {1, 2}),
                       (2, 0, [(0, ~o, 0), (0, ~i & o, 1), (1, ~i & o, 1), (1, ~o, 0)], {1}),
                       Verdict.UNREALIZABLE))
    return pairs


def _env_attractor(num_states: int, delta: Dict[Tuple[int, int, int], Optional[int]],
                   num_in: int, num_out: int) -> set:
    """States from which the environment forces a missing move."""
    attr: set = set()
    grew = True
    while grew:
        grew = False
        for p in range(num_states):
            if p in attr:
                continue
            if any(all(delta[(p, a, b)] is None or delta[(p, a, b)] in attr for b in range(num_out))
                   for a in range(num_in)):
                attr.add(p)
                grew = True
    return attr


def safety_game_pair(rng: np.random.Generator, num_states: int, num_inputs: int = 1,
                     num_outputs: int = 1, violation_prob: float = 0.3) -> PairedInstance:
    """A random deterministic safety specification and its known winner.

    The specification is a complete deterministic transition table over
    pure IOs in which some moves are violations. `aut` routes violations to
    a Büchi sink; `neg_aut` keeps only the legal moves, all states Büchi.
    """
    inputs = [f"i{n}" for n in range(num_inputs)]
    outputs = [f"o{n}" for n in range(num_outputs)]
    engine = BoolEngine(inputs, outputs)
    in_cubes = list(itertools.product((False, True), repeat=num_inputs))
    out_cubes = list(itertools.product((False, True), repeat=num_outputs))

    delta: Dict[Tuple[int, int, int], Optional[int]] = {}
    for p in range(num_states):
        for a in range(len(in_cubes)):
            for b in range(len(out_cubes)):
                legal = rng.random() >= violation_prob
                delta[(p, a, b)] = int(rng.integers(0, num_states)) if legal else None

    def in_cube(a: int) -> BoolFn:
        return engine.cube_fn({engine.lookup(n): v for n, v in zip(inputs, in_cubes[a])})

    def out_cube(b: int) -> BoolFn:
        return engine.cube_fn({engine.lookup(n): v for n, v in zip(outputs, out_cubes[b])})

    # One edge per (state, pure input, target), labeled input-cube & output-set,
    # so output shifting slices every label exactly.
    sink = num_states
    outputs_to: Dict[Tuple[int, int, int], BoolFn] = {}
    for (p, a, b), q in delta.items():
        key = (p, a, sink if q is None else q)
        outputs_to[key] = outputs_to.get(key, engine.false) | out_cube(b)
    labels = [(p, in_cube(a) & outs, q) for (p, a, q), outs in outputs_to.items()]

    aut_edges = labels + [(sink, engine.true, sink)]
    neg_edges = [(p, label, q) for p, label, q in labels if q != sink]
    attr = _env_attractor(num_states, delta, len(in_cubes), len(out_cubes))
    expected = Verdict.UNREALIZABLE if 0 in attr else Verdict.REALIZABLE
    return PairedInstance(
        f"safety-{num_states}x{num_inputs}x{num_outputs}",
        build_automaton(engine, num_states + 1, 0, aut_edges, {sink}),
        build_automaton(engine, num_states, 0, neg_edges, set(range(num_states))),
        expected,
    )


def paired_corpus(seed: int = 0, random_count: int = 14, max_states: int = 4) -> List[PairedInstance]:
    rng = np.random.default_rng(seed)
    pairs = hand_pairs()
    for n in range(random_count):
        instance = safety_game_pair(
            rng,
            num_states=int(rng.integers(1, max_states + 1)),
            num_inputs=int(rng.integers(1, 3)),
            num_outputs=int(rng.integers(1, 3)),
        )
        instance.name += f"-{n}"
        pairs.append(instance)
    return pairs
