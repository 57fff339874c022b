"""Pure-Python event queue: a binary min-heap keyed by (fire_at, seq)."""

import heapq


class EventQueue:
    """Min-heap of (fire_at, seq, item) entries.

    Keys are pairs of integers; seq values are unique, so the key order is
    total and the payload never takes part in comparisons.
    """

    __slots__ = ("_heap",)

    def __init__(self):
        self._heap = []

    def __len__(self):
        return len(self._heap)

    def push(self, fire_at, seq, item):
        heapq.heappush(self._heap, (fire_at, seq, item))

    def pop(self):
        if not self._heap:
            raise IndexError("pop from empty EventQueue")
        return heapq.heappop(self._heap)

    def peek_key(self):
        if not self._heap:
            return None
        fire_at, seq, _ = self._heap[0]
        return fire_at, seq
