"""Event kernel: ordering, tie-breaks, cancellation, run_until semantics."""

import pytest

from simrun import Kernel, NS_PER_S, s_to_ticks, ticks_to_s
from simrun.errors import LivelockError, SchedulingInPastError, SimulationError


def test_s_to_ticks_roundtrip():
    assert s_to_ticks(1.0) == NS_PER_S
    assert s_to_ticks(0.0234375) == 23_437_500
    assert ticks_to_s(23_437_500) == 0.0234375


def test_firing_order_by_time():
    k = Kernel()
    fired = []
    k.schedule(s_to_ticks(5), lambda a: fired.append(a), "t5")
    k.schedule(s_to_ticks(3), lambda a: fired.append(a), "t3")
    k.run_until(s_to_ticks(10))
    assert fired == ["t3", "t5"]


def test_same_instant_tie_break_by_seq():
    k = Kernel()
    fired = []
    first = k.schedule(s_to_ticks(7), lambda a: fired.append(a), "early-seq")
    second = k.schedule(s_to_ticks(7), lambda a: fired.append(a), "late-seq")
    assert first.seq < second.seq
    k.run_until(s_to_ticks(7))
    assert fired == ["early-seq", "late-seq"]


def test_cancel_before_firing():
    k = Kernel()
    fired = []
    ev = k.schedule(s_to_ticks(1), lambda a: fired.append(a), "x")
    assert k.cancel(ev) is True
    assert k.cancel(ev) is False
    stats = k.run_until(s_to_ticks(2))
    assert fired == []
    assert stats.processed == 0
    assert k.cancelled == 1


def test_run_until_empty_queue_advances_clock():
    k = Kernel()
    stats = k.run_until(s_to_ticks(1000))
    assert stats.processed == 0
    assert stats.clock == s_to_ticks(1000)
    assert k.now == s_to_ticks(1000)


def test_run_until_boundary_leaves_future_pending():
    k = Kernel()
    fired = []
    for t in (1, 2, 3):
        k.schedule(s_to_ticks(t), lambda a: fired.append(a), t)
    stats = k.run_until(s_to_ticks(2.5))
    assert stats.processed == 2
    assert fired == [1, 2]
    assert k.pending == 1
    k.run_until(s_to_ticks(3))
    assert fired == [1, 2, 3]


def test_event_at_exact_t_end_fires():
    k = Kernel()
    fired = []
    k.schedule(s_to_ticks(2), lambda a: fired.append(a), "edge")
    k.run_until(s_to_ticks(2))
    assert fired == ["edge"]


def test_schedule_in_past_rejected():
    k = Kernel()
    k.run_until(100)
    with pytest.raises(SchedulingInPastError):
        k.schedule(99, lambda a: None)
    k.schedule(100, lambda a: None)


def test_run_until_backwards_rejected():
    k = Kernel()
    k.run_until(100)
    with pytest.raises(SimulationError):
        k.run_until(50)


def test_schedule_during_run_same_instant():
    k = Kernel()
    fired = []

    def chain(depth):
        fired.append(depth)
        if depth < 3:
            k.schedule(k.now, chain, depth + 1)

    k.schedule(10, chain, 0)
    k.run_until(10)
    assert fired == [0, 1, 2, 3]
    assert k.now == 10


def test_livelock_guard():
    k = Kernel(livelock_cap=1000)

    def forever(_a):
        k.schedule(k.now, forever, None)

    k.schedule(0, forever, None)
    with pytest.raises(LivelockError):
        k.run_until(1)


def test_counters_consistent():
    k = Kernel()
    evs = [k.schedule(i, lambda a: None) for i in range(5)]
    k.cancel(evs[4])
    k.run_until(10)
    assert k.scheduled == 5
    assert k.processed == 4
    assert k.cancelled == 1
    assert k.pending == 0
