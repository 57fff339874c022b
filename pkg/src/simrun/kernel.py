"""Deterministic discrete-event engine on an integer-nanosecond clock.

Events fire in (fire_at, seq) order; seq is the scheduling sequence number,
so ties at one instant resolve in scheduling order. All times are integer
nanoseconds, which keeps arithmetic exact and output files diff-stable.
"""

from typing import Any, Callable, NamedTuple, Optional

from ._core import EventQueue
from .errors import LivelockError, SchedulingInPastError, SimulationError

NS_PER_S = 1_000_000_000

PENDING = 0
FIRED = 1
CANCELLED = 2


def s_to_ticks(seconds: float) -> int:
    """Convert seconds to integer nanoseconds, rounding to nearest."""
    return round(seconds * NS_PER_S)


def ticks_to_s(ticks: int) -> float:
    return ticks / NS_PER_S


class Event:
    """Handle returned by Kernel.schedule."""

    __slots__ = ("fire_at", "seq", "kind", "target", "fn", "arg", "state")

    def __init__(self, fire_at: int, seq: int, kind: str, target: Optional[str],
                 fn: Callable[[Any], None], arg: Any):
        self.fire_at = fire_at
        self.seq = seq
        self.kind = kind
        self.target = target
        self.fn = fn
        self.arg = arg
        self.state = PENDING

    def __repr__(self):
        state = {PENDING: "pending", FIRED: "fired", CANCELLED: "cancelled"}[self.state]
        return f"Event(fire_at={self.fire_at}, seq={self.seq}, kind={self.kind!r}, {state})"


class RunStats(NamedTuple):
    processed: int
    clock: int


class Kernel:
    """Single-threaded event loop owning one simulation run."""

    def __init__(self, livelock_cap: int = 1_000_000, queue=None):
        self.now: int = 0
        self.livelock_cap = livelock_cap
        self.scheduled = 0
        self.processed = 0
        self.cancelled = 0
        self._queue = queue if queue is not None else EventQueue()
        self._next_seq = 0

    @property
    def pending(self) -> int:
        return self.scheduled - self.processed - self.cancelled

    def schedule(self, fire_at: int, fn: Callable[[Any], None], arg: Any = None,
                 kind: str = "", target: Optional[str] = None) -> Event:
        """Queue fn(arg) to run at fire_at; returns a cancellation handle."""
        if fire_at < self.now:
            raise SchedulingInPastError(
                f"cannot schedule {kind or 'event'} at {fire_at} ns; clock is {self.now} ns"
            )
        ev = Event(fire_at, self._next_seq, kind, target, fn, arg)
        self._next_seq += 1
        self.scheduled += 1
        self._queue.push(fire_at, ev.seq, ev)
        return ev

    def cancel(self, event: Event) -> bool:
        """Mark a pending event dead; it is skipped when popped (lazy removal)."""
        if event.state == PENDING:
            event.state = CANCELLED
            self.cancelled += 1
            return True
        return False

    def run_until(self, t_end: int) -> RunStats:
        """Fire every pending event with fire_at <= t_end in key order.

        The clock is left at t_end even when the queue drains early, so a
        run's duration is exact regardless of traffic.
        """
        if t_end < self.now:
            raise SimulationError(f"run_until target {t_end} ns is before clock {self.now} ns")
        processed_before = self.processed
        same_instant = 0
        last_fired_at = -1
        queue = self._queue
        while len(queue) > 0:
            key = queue.peek_key()
            if key[0] > t_end:
                break
            fire_at, _seq, ev = queue.pop()
            if ev.state == CANCELLED:
                continue
            self.now = fire_at
            if fire_at == last_fired_at:
                same_instant += 1
                if same_instant > self.livelock_cap:
                    raise LivelockError(
                        f"{same_instant} events fired at t={fire_at} ns without the clock advancing"
                    )
            else:
                last_fired_at = fire_at
                same_instant = 1
            ev.state = FIRED
            self.processed += 1
            ev.fn(ev.arg)
        self.now = t_end
        return RunStats(self.processed - processed_before, self.now)
