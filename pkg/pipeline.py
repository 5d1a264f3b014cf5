import logging
import math
import multiprocessing as mp
import queue
import sys
import threading
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterator, List, Optional

from rich.console import Console
from rich.logging import RichHandler

import config
from automaton import Automaton
from errors import RunAborted, UsageError
from hoa_format import read_hoa_file
from solver import SolveConfig, Solver
from unreal import check_unreal

logger = logging.getLogger(__name__)

err_console = Console(stderr=True)


class Verdict(str, Enum):
    REALIZABLE = "REALIZABLE"
    UNREALIZABLE = "UNREALIZABLE"
    UNKNOWN = "UNKNOWN"

    @property
    def exit_code(self) -> int:
        return {"REALIZABLE": 10, "UNREALIZABLE": 20, "UNKNOWN": 0}[self.value]


class CheckMode(str, Enum):
    REAL = "real"
    UNREAL = "unreal"
    BOTH = "both"


def k_schedule(initial: int = None, growth: float = None, maximum: int = None) -> Iterator[int]:
    """initial, ceil(initial * growth), ... capped at maximum."""
    initial = config.K_INITIAL if initial is None else initial
    growth = config.K_GROWTH if growth is None else growth
    maximum = config.K_MAX if maximum is None else maximum
    if initial < 1:
        raise UsageError(f"initial k must be at least 1, got {initial}")
    if growth <= 1:
        raise UsageError(f"k growth must exceed 1, got {growth}")
    if initial > maximum:
        raise UsageError(f"initial k {initial} exceeds the maximum {maximum}")
    k = initial
    while True:
        yield k
        if k >= maximum:
            return
        k = min(maximum, max(k + 1, math.ceil(k * growth)))


@dataclass(frozen=True)
class RunPlan:
    aut_path: Optional[str]
    neg_aut_path: Optional[str] = None
    check: CheckMode = CheckMode.REAL
    k_initial: int = config.K_INITIAL
    k_growth: float = config.K_GROWTH
    k_max: int = config.K_MAX
    timeout: float = config.TIMEOUT
    outs: Optional[List[str]] = None
    solve: SolveConfig = field(default_factory=SolveConfig)

    def __post_init__(self):
        object.__setattr__(self, "check", CheckMode(self.check))
        if self.timeout <= 0:
            raise UsageError("timeout must be positive")
        self.schedule()
        if self.check in (CheckMode.REAL, CheckMode.BOTH) and not self.aut_path:
            raise UsageError(f"--check {self.check.value} needs --aut")
        if self.check in (CheckMode.UNREAL, CheckMode.BOTH) and not self.neg_aut_path:
            raise UsageError(f"--check {self.check.value} needs --neg-aut (automaton recognizing the specification itself)")

    def schedule(self) -> List[int]:
        return list(k_schedule(self.k_initial, self.k_growth, self.k_max))


def run_real(automaton: Automaton, plan: RunPlan, cancel=None) -> Verdict:
    """Solve over the k schedule; REALIZABLE at the first success."""
    for k in plan.schedule():
        if Solver(automaton, replace(plan.solve, k=k), cancel).run().realizable:
            logger.info("Realizable at k=%d", k)
            return Verdict.REALIZABLE
        logger.info("Not realizable at k=%d", k)
    return Verdict.UNKNOWN


def run_unreal(negated: Automaton, plan: RunPlan, cancel=None) -> Verdict:
    """check_unreal over the k schedule; UNREALIZABLE at the first success."""
    for k in plan.schedule():
        if check_unreal(negated, replace(plan.solve, k=k), cancel):
            logger.info("Environment wins at k=%d", k)
            return Verdict.UNREALIZABLE
        logger.info("Environment does not win at k=%d", k)
    return Verdict.UNKNOWN


def _run_side(check: CheckMode, plan: RunPlan, cancel) -> Verdict:
    if check is CheckMode.REAL:
        return run_real(read_hoa_file(plan.aut_path, plan.outs), plan, cancel)
    return run_unreal(read_hoa_file(plan.neg_aut_path, plan.outs), plan, cancel)


def run_single(plan: RunPlan) -> Verdict:
    """One check in this process, cancelled by a timer after plan.timeout."""
    cancel = threading.Event()
    timer = threading.Timer(plan.timeout, cancel.set)
    timer.daemon = True
    timer.start()
    try:
        return _run_side(plan.check, plan, cancel)
    except RunAborted as e:
        logger.warning("Run aborted: %s", e)
        return Verdict.UNKNOWN
    finally:
        timer.cancel()


def race_worker(check: CheckMode, plan: RunPlan, cancel, results, log_level: str = None):
    """Process entry point of one side of the race; reports (side, verdict, error)."""
    if log_level:
        configure_logging(log_level, plan.solve.trace)
    try:
        verdict = _run_side(check, plan, cancel)
        results.put((check.value, verdict.value, None))
    except RunAborted as e:
        results.put((check.value, Verdict.UNKNOWN.value, None if e.reason == "cancelled" else str(e)))
    except Exception as e:
        results.put((check.value, Verdict.UNKNOWN.value, f"{type(e).__name__}: {e}"))


def race(plan: RunPlan, log_level: str = None) -> Verdict:
    """Run both checks in separate processes; the first definitive verdict wins."""
    ctx = mp.get_context("spawn")
    cancel = ctx.Event()
    results = ctx.Queue()
    workers = [
        ctx.Process(target=race_worker, args=(side, plan, cancel, results, log_level), daemon=True)
        for side in (CheckMode.REAL, CheckMode.UNREAL)
    ]
    for w in workers:
        w.start()

    verdict = Verdict.UNKNOWN
    deadline = time.monotonic() + plan.timeout
    pending = len(workers)
    try:
        while pending:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                logger.warning("Timeout of %.1fs reached", plan.timeout)
                break
            try:
                side, value, error = results.get(timeout=remaining)
            except queue.Empty:
                continue
            pending -= 1
            if error:
                logger.warning("%s check failed: %s", side, error)
            if value != Verdict.UNKNOWN.value:
                verdict = Verdict(value)
                logger.info("%s check concluded %s", side, value)
                break
    finally:
        cancel.set()
        for w in workers:
            w.join(timeout=5)
            if w.is_alive():
                w.terminate()
    return verdict


def run_plan(plan: RunPlan, log_level: str = None) -> Verdict:
    if plan.check is CheckMode.BOTH:
        return race(plan, log_level)
    return run_single(plan)


def configure_logging(level: str = None, trace: bool = False):
    """RichHandler on stderr for the library loggers, bare lines for traces."""
    level = (level or config.LOG_LEVEL).upper()
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )
    trace_logger = logging.getLogger("solver.trace")
    trace_logger.handlers.clear()
    trace_logger.propagate = False
    if trace:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(message)s"))
        trace_logger.addHandler(handler)
        trace_logger.setLevel(logging.INFO)
    else:
        trace_logger.setLevel(logging.WARNING)
