# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled event queue: binary min-heap over (fire_at, seq) int64 key pairs.

Behavioral twin of _evqueue_py.EventQueue; keys live in C arrays and the
payloads in a parallel Python list.
"""

from libc.stdint cimport int64_t
from libc.stdlib cimport free, realloc


cdef class EventQueue:
    cdef int64_t *_at
    cdef int64_t *_seq
    cdef list _items
    cdef Py_ssize_t _n
    cdef Py_ssize_t _cap

    def __cinit__(self):
        self._at = NULL
        self._seq = NULL
        self._n = 0
        self._cap = 0
        self._items = []

    def __dealloc__(self):
        if self._at != NULL:
            free(self._at)
        if self._seq != NULL:
            free(self._seq)

    def __len__(self):
        return self._n

    cdef int _reserve(self, Py_ssize_t want) except -1:
        cdef Py_ssize_t cap = self._cap if self._cap > 0 else 256
        cdef int64_t *at
        cdef int64_t *seq
        while cap < want:
            cap *= 2
        if cap == self._cap:
            return 0
        at = <int64_t *> realloc(self._at, cap * sizeof(int64_t))
        if at == NULL:
            raise MemoryError()
        self._at = at
        seq = <int64_t *> realloc(self._seq, cap * sizeof(int64_t))
        if seq == NULL:
            raise MemoryError()
        self._seq = seq
        self._cap = cap
        return 0

    cdef inline bint _less(self, Py_ssize_t i, Py_ssize_t j):
        if self._at[i] != self._at[j]:
            return self._at[i] < self._at[j]
        return self._seq[i] < self._seq[j]

    cdef inline void _swap(self, Py_ssize_t i, Py_ssize_t j):
        cdef int64_t t
        t = self._at[i]
        self._at[i] = self._at[j]
        self._at[j] = t
        t = self._seq[i]
        self._seq[i] = self._seq[j]
        self._seq[j] = t
        self._items[i], self._items[j] = self._items[j], self._items[i]

    def push(self, fire_at, seq, item):
        cdef Py_ssize_t i, parent
        self._reserve(self._n + 1)
        i = self._n
        self._at[i] = fire_at
        self._seq[i] = seq
        self._items.append(item)
        self._n += 1
        while i > 0:
            parent = (i - 1) >> 1
            if self._less(i, parent):
                self._swap(i, parent)
                i = parent
            else:
                break

    def pop(self):
        cdef Py_ssize_t i, left, right, smallest
        if self._n == 0:
            raise IndexError("pop from empty EventQueue")
        out = (self._at[0], self._seq[0], self._items[0])
        self._n -= 1
        last = self._items.pop()
        if self._n > 0:
            self._at[0] = self._at[self._n]
            self._seq[0] = self._seq[self._n]
            self._items[0] = last
            i = 0
            while True:
                left = 2 * i + 1
                right = left + 1
                smallest = i
                if left < self._n and self._less(left, smallest):
                    smallest = left
                if right < self._n and self._less(right, smallest):
                    smallest = right
                if smallest == i:
                    break
                self._swap(i, smallest)
                i = smallest
        return out

    def peek_key(self):
        if self._n == 0:
            return None
        return (self._at[0], self._seq[0])
