"""Simulation clocks. All times are integer microseconds from the run start."""

from __future__ import annotations

import time
from typing import Literal

ClockMode = Literal["virtual", "wall"]


class SimClock:
    """Virtual time moves only when the scheduler advances it (or a function
    charges simulated execution time via :meth:`elapse`); wall time follows a
    monotonic clock and :meth:`advance_to` sleeps."""

    def __init__(self, mode: ClockMode = "virtual"):
        if mode not in ("virtual", "wall"):
            raise ValueError(f"unknown clock mode {mode!r}")
        self.mode = mode
        self._now_us = 0
        self._origin_ns = time.perf_counter_ns()

    @property
    def is_virtual(self) -> bool:
        return self.mode == "virtual"

    def reset(self) -> None:
        self._now_us = 0
        self._origin_ns = time.perf_counter_ns()

    def now_us(self) -> int:
        if self.is_virtual:
            return self._now_us
        return (time.perf_counter_ns() - self._origin_ns) // 1000

    def advance_to(self, t_us: int) -> None:
        if self.is_virtual:
            if t_us > self._now_us:
                self._now_us = t_us
            return
        remaining = t_us - self.now_us()
        if remaining > 0:
            time.sleep(remaining / 1e6)

    def elapse(self, us: int) -> None:
        """Spend ``us`` microseconds of execution time."""
        if self.is_virtual:
            self._now_us += us
        else:
            time.sleep(us / 1e6)
