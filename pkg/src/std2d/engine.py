"""Deterministic discrete-event core.

A single total-order queue keyed on (time, insertion sequence): ties fire
in scheduling order, so identical inputs always replay identically. Time is
measured in TTIs (1 ms subframes).
"""

import heapq


class Simulator:
    def __init__(self) -> None:
        self._heap: list = []
        self._counter = 0
        self.now = 0

    def schedule(self, time_tti: int, fn, *args) -> None:
        if time_tti < self.now:
            raise ValueError(f"cannot schedule at {time_tti}, now is {self.now}")
        heapq.heappush(self._heap, (time_tti, self._counter, fn, args))
        self._counter += 1

    def schedule_in(self, delay: int, fn, *args) -> None:
        self.schedule(self.now + delay, fn, *args)

    def run(self) -> None:
        """Drain the queue; handlers may schedule further events."""
        while self._heap:
            time_tti, _, fn, args = heapq.heappop(self._heap)
            self.now = time_tti
            fn(*args)

    @property
    def pending(self) -> int:
        return len(self._heap)
