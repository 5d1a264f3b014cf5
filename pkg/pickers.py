import heapq
import logging
from enum import Enum
from typing import TYPE_CHECKING, List, Optional, Sequence

import numpy as np

from actions import InputAction
from downset import Downset
from errors import UsageError

if TYPE_CHECKING:
    from solver import BackwardImages

logger = logging.getLogger(__name__)


class PickerKind(str, Enum):
    ROUND_ROBIN = "rr"
    CRITICAL = "critical"
    CRITICAL_PQ = "critical-pq"
    CRITICAL_RANDP = "critical-randp"
    CRITICAL_RANDF = "critical-randf"


class Picker:
    """Chooses the next input-action; None means S is a fixed point."""

    def __init__(self, actions: Sequence[InputAction], seed: int = 0):
        self.actions = list(actions)
        self.seed = seed

    def pick(self, S: Downset, images: "BackwardImages") -> Optional[InputAction]:
        raise NotImplementedError

    def feedback(self, ia: InputAction, changed: bool):
        pass


class RoundRobinPicker(Picker):
    """Cycles through the actions until a full pass changes nothing."""

    def __init__(self, actions, seed=0):
        super().__init__(actions, seed)
        self.cursor = 0
        self.unchanged = 0

    def pick(self, S, images):
        if not self.actions or self.unchanged >= len(self.actions):
            return None
        ia = self.actions[self.cursor]
        self.cursor = (self.cursor + 1) % len(self.actions)
        return ia

    def feedback(self, ia, changed):
        self.unchanged = 0 if changed else self.unchanged + 1


class CriticalPicker(Picker):
    """Picks an input-action certified to drop a maximal element of S.

    An element m of S survives cpre(S, ia) iff some io-action of ia has a
    backward image containing m. When no action drops any element, one
    round-robin pass certifies the fixed point.
    """

    def __init__(self, actions, seed=0):
        super().__init__(actions, seed)
        self._certifier: Optional[RoundRobinPicker] = None

    def order(self) -> List[int]:
        return list(range(len(self.actions)))

    def _dropped(self, elements, ia: InputAction, images: "BackwardImages") -> np.ndarray:
        """Mask of the elements no io-action image of ia contains."""
        kept = np.zeros(len(elements), dtype=bool)
        for a in ia.ioactions:
            kept |= images.image(a).covers(elements)
            if kept.all():
                break
        return ~kept

    def pick(self, S, images):
        if self._certifier is None:
            # the first element with a dropping action, then the first such action
            elements = S.max_elements()
            first, chosen = len(elements), None
            for n in self.order():
                dropped = np.flatnonzero(self._dropped(elements, self.actions[n], images))
                if len(dropped) and dropped[0] < first:
                    first, chosen = int(dropped[0]), self.actions[n]
                    if first == 0:
                        break
            if chosen is not None:
                return chosen
            logger.debug("No critical input-action found; certifying the fixed point")
            self._certifier = RoundRobinPicker(self.actions)
        return self._certifier.pick(S, images)

    def feedback(self, ia, changed):
        if self._certifier is not None:
            self._certifier.feedback(ia, changed)
            if changed:
                self._certifier = None


class PriorityCriticalPicker(CriticalPicker):
    """Scans the most recently successful input-actions first."""

    def __init__(self, actions, seed=0):
        super().__init__(actions, seed)
        self._last_success = [0] * len(self.actions)
        self._clock = 0

    def order(self):
        queue = [(-self._last_success[n], n) for n in range(len(self.actions))]
        heapq.heapify(queue)
        return [heapq.heappop(queue)[1] for _ in range(len(queue))]

    def feedback(self, ia, changed):
        super().feedback(ia, changed)
        if changed:
            self._clock += 1
            for n, candidate in enumerate(self.actions):
                if candidate is ia:
                    self._last_success[n] = self._clock


class PartialRandomCriticalPicker(CriticalPicker):
    """Shuffles a random contiguous window of the scan order on every pick."""

    def __init__(self, actions, seed=0):
        super().__init__(actions, seed)
        self.rng = np.random.default_rng(seed)

    def order(self):
        order = list(range(len(self.actions)))
        if len(order) < 2:
            return order
        width = max(2, len(order) // 2)
        start = int(self.rng.integers(0, len(order) - width + 1))
        window = order[start:start + width]
        order[start:start + width] = [window[i] for i in self.rng.permutation(width)]
        return order


class FullRandomCriticalPicker(CriticalPicker):
    """Scans the input-actions in a fresh random order on every pick."""

    def __init__(self, actions, seed=0):
        super().__init__(actions, seed)
        self.rng = np.random.default_rng(seed)

    def order(self):
        return [int(n) for n in self.rng.permutation(len(self.actions))]


_PICKERS = {
    PickerKind.ROUND_ROBIN: RoundRobinPicker,
    PickerKind.CRITICAL: CriticalPicker,
    PickerKind.CRITICAL_PQ: PriorityCriticalPicker,
    PickerKind.CRITICAL_RANDP: PartialRandomCriticalPicker,
    PickerKind.CRITICAL_RANDF: FullRandomCriticalPicker,
}


def make_picker(kind, actions: Sequence[InputAction], seed: int = 0) -> Picker:
    try:
        kind = PickerKind(kind)
    except ValueError:
        raise UsageError(f"unknown picker '{kind}'") from None
    return _PICKERS[kind](actions, seed)
