"""Injectable clocks.

Everything that records or compares timestamps takes a clock object instead of
calling time.time() directly, so deadline arithmetic (30-day acknowledgment
windows, TTL sweeps, receipt timing) can be driven deterministically in tests.
"""

from __future__ import annotations

import time
from typing import Protocol

DAY_SECONDS = 86_400.0


def days(n: float) -> float:
    """Duration of n days in seconds, using the fixed 30-day-month convention."""
    return n * DAY_SECONDS


class Clock(Protocol):
    def now(self) -> float:
        """Seconds since the epoch (real or simulated)."""
        ...


class SystemClock:
    """Wall clock."""

    def now(self) -> float:
        return time.time()


class SimulatedClock:
    """Manually advanced clock; time never moves unless the test moves it."""

    def __init__(self, start: float = 0.0) -> None:
        self._now = float(start)

    def now(self) -> float:
        return self._now

    def advance(self, seconds: float) -> float:
        if seconds < 0:
            raise ValueError("clock cannot move backward")
        self._now += seconds
        return self._now

    def advance_days(self, n: float) -> float:
        return self.advance(days(n))
