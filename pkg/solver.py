import logging
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

import config
from actions import InputAction, InputSelection, IOAction, build_actions
from automaton import Automaton, SplitMode, preprocess, split_boolean
from downset import Downset, DownsetBackend, safe_k
from errors import RunAborted, UsageError
from pickers import PickerKind, make_picker
from valuation import StepFn, VectorSpace

logger = logging.getLogger(__name__)
trace_logger = logging.getLogger("solver.trace")

_SWITCH = {"on": True, "off": False}


def _switch(value) -> bool:
    if isinstance(value, bool):
        return value
    try:
        return _SWITCH[str(value).lower()]
    except KeyError:
        raise UsageError(f"expected on/off, got '{value}'") from None


def _vector_kind(value) -> str:
    value = str(value).split("+")[0]
    if value not in ("plain", "lanes"):
        raise UsageError(f"unknown vector backend '{value}'")
    return value


@dataclass(frozen=True)
class SolveConfig:
    """One solver run. String values are accepted for every enum field."""

    k: int = config.K_INITIAL
    vector: str = config.VECTOR_BACKEND
    downset: DownsetBackend = config.DOWNSET_BACKEND
    bool_states: bool = config.BOOL_STATES
    inputs: InputSelection = config.INPUT_SELECTION
    precompute: bool = config.PRECOMPUTE
    picker: PickerKind = config.PICKER
    seed: int = config.SEED
    step_budget: int = config.STEP_BUDGET
    trace: bool = False

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise UsageError(f"k must be a positive integer, got {self.k!r}")
        if self.step_budget < 1:
            raise UsageError("step budget must be positive")
        try:
            object.__setattr__(self, "downset", DownsetBackend(self.downset))
            object.__setattr__(self, "inputs", InputSelection(self.inputs))
            object.__setattr__(self, "picker", PickerKind(self.picker))
        except ValueError as e:
            raise UsageError(str(e)) from None
        object.__setattr__(self, "vector", _vector_kind(self.vector))
        object.__setattr__(self, "bool_states", _switch(self.bool_states))
        object.__setattr__(self, "precompute", _switch(self.precompute))


@dataclass
class SolveOutcome:
    realizable: bool
    k: int
    applications: int
    changes: int
    downset: Downset = field(repr=False)


def bwd(S: Downset, a: IOAction, step: StepFn = None) -> Downset:
    """Backward image of S's maximal elements under one io-action."""
    step = step or S.space.compile_step(a.pairs)
    if S.space.lanes:
        return S.with_rows(step.batch(S.rows()))
    result = S.empty_like()
    for v in S.max_elements():
        result.insert(step(v))
    result.bulk_done()
    return result


def cpre(S: Downset, ia: InputAction, images: "BackwardImages" = None) -> Downset:
    """S intersected with the union of the backward images of ia's io-actions."""
    parts = [images.image(a) if images is not None else bwd(S, a) for a in ia.ioactions]
    if S.space.lanes:
        union = S.with_rows(np.concatenate([part.rows() for part in parts] or [S.rows()[:0]]))
    else:
        union = S.empty_like()
        for part in parts:
            for v in part.max_elements():
                union.insert(v)
        union.bulk_done()
    return S.intersect(union)


class BackwardImages:
    """Per-downset memo of bwd images, shared by the picker and cpre."""

    def __init__(self, S: Downset, steps: Dict[int, StepFn] = None):
        self.S = S
        self._steps = steps if steps is not None else {}
        self._images: Dict[int, Downset] = {}

    def step(self, a: IOAction) -> StepFn:
        key = id(a)
        if key not in self._steps:
            self._steps[key] = self.S.space.compile_step(a.pairs)
        return self._steps[key]

    def image(self, a: IOAction) -> Downset:
        key = id(a)
        if key not in self._images:
            self._images[key] = bwd(self.S, a, self.step(a))
        return self._images[key]

    def reset(self, S: Downset):
        self.S = S
        self._images = {}


class Solver:
    def __init__(self, automaton: Automaton, cfg: SolveConfig = None, cancel=None):
        """Prepare a BackwardRealizability run.

        Args:
            automaton: The game arena; its `inputs` are the environment's role
            cfg: Backends, k and picker
            cancel: Optional token with is_set(), polled before every cpre
        """
        self.cfg = cfg or SolveConfig()
        self.cancel = cancel
        self.automaton = preprocess(automaton)
        mode = SplitMode.BOUNDED if self.cfg.bool_states else SplitMode.NONE
        self.split = split_boolean(self.automaton, mode)
        self.space = VectorSpace(
            self.automaton.num_states, self.cfg.k,
            boolean_states=self.split.boolean_states,
            lanes=self.cfg.vector == "lanes",
        )
        self.actions = build_actions(self.automaton, self.cfg.inputs, self.cfg.precompute)
        # io-actions outlive every images memo, so their ids stay valid
        self._steps: Dict[int, StepFn] = {}

    def _label(self, ia: InputAction) -> str:
        return self.automaton.engine.to_formula(ia.input)

    def run(self) -> SolveOutcome:
        cfg = self.cfg
        S = safe_k(self.space, cfg.downset)
        images = BackwardImages(S, self._steps)
        picker = make_picker(cfg.picker, self.actions, cfg.seed)
        applications = changes = 0
        tracing = cfg.trace and trace_logger.isEnabledFor(logging.INFO)

        while True:
            if self.cancel is not None and self.cancel.is_set():
                raise RunAborted("cancelled", applications)
            ia = picker.pick(S, images)
            if ia is None:
                break
            if applications >= cfg.step_budget:
                raise RunAborted(f"step budget of {cfg.step_budget} exhausted", applications)
            result = cpre(S, ia, images)
            applications += 1
            changed = not result.equal(S)
            picker.feedback(ia, changed)
            if changed:
                changes += 1
                S = result
                images.reset(S)
            if tracing:
                trace_logger.info("iter=%d input=%s antichain=%d changed=%d",
                                  applications, self._label(ia), len(S), int(changed))

        realizable = S.contains(self.space.witness(self.automaton.initial))
        logger.debug("k=%d: %s after %d cpre applications (%d changing), antichain %d",
                     cfg.k, "realizable" if realizable else "not realizable",
                     applications, changes, len(S))
        return SolveOutcome(realizable, cfg.k, applications, changes, S)


def solve(automaton: Automaton, cfg: SolveConfig = None, cancel=None) -> bool:
    """Whether the fixed point of cpre from safe_k holds a vector with q0 >= 0."""
    return Solver(automaton, cfg, cancel).run().realizable
