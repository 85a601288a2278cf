"""Virtual clock and latest-value mailboxes for the multi-rate pipeline."""

from __future__ import annotations

import heapq
import itertools
import threading
from typing import Generic, TypeVar

PHYSICS, PREDICTION, HAPTIC = "physics", "prediction", "haptic"
# ties at the same instant dispatch in this order
LOOP_PRIORITY = {PHYSICS: 0, PREDICTION: 1, HAPTIC: 2}

T = TypeVar("T")


class VirtualClock:
    """Deterministic event queue; time only moves when an event is popped."""

    def __init__(self, start_ms: float = 0.0):
        self.now = start_ms
        self._queue: list[tuple[float, int, int, str]] = []
        self._seq = itertools.count()

    def schedule(self, due_ms: float, loop_id: str) -> None:
        if due_ms < self.now:
            raise ValueError(f"cannot schedule {loop_id} at {due_ms} before now={self.now}")
        heapq.heappush(self._queue, (due_ms, LOOP_PRIORITY[loop_id], next(self._seq), loop_id))

    def pop(self) -> tuple[float, str]:
        due, _, _, loop_id = heapq.heappop(self._queue)
        self.now = due
        return due, loop_id

    def __bool__(self) -> bool:
        return bool(self._queue)

    def peek_time(self) -> float | None:
        return self._queue[0][0] if self._queue else None


class Mailbox(Generic[T]):
    """Single-slot latest-value box with overwrite semantics.

    Readers never block; ``version`` increments on every put so a reader can
    tell whether the value changed since it last looked.
    """

    def __init__(self):
        self._value: T | None = None
        self._stamp = -1.0
        self.version = 0
        self._lock = threading.Lock()

    def put(self, value: T, stamp_ms: float) -> None:
        with self._lock:
            self._value = value
            self._stamp = stamp_ms
            self.version += 1

    def get(self) -> tuple[T | None, float, int]:
        with self._lock:
            return self._value, self._stamp, self.version
